//! Recovering the isometry behind an orthogonality preserving map.
//!
//! [`classify_and_reconstruct`] reads a [`RayMapTable`] on a fixed set of anchor
//! rays and returns the linear or conjugate-linear isometry inducing it.
//! [`descend_full`] reduces an oracle on `G_k(C^n)` to one on rays by
//! repeatedly intersecting images of stars, then reconstructs from that.

use std::collections::HashMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::rc::Rc;
use std::sync::Mutex;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmann::{is_adjacent, is_ortho_adjacent, is_orthogonal, random_subspace_of};
use crate::hilbert::{
    complement, inner_unchecked, intersect, sum, CMatrix, CVector, Ray, Subspace,
};
use crate::isometry::{Isometry, OperatorClass};
use crate::projective::RayMapTable;
use crate::report::{CheckReport, Violation};
use crate::sampling::{
    derive_seed, orthogonal_pair, random_ray, random_ray_in, random_subspace, seeded,
};
use crate::tolerance::Tolerance;

/// `[e_1 + z e_j] / sqrt(2)` (indices are zero-based).
fn anchor_sum(n: usize, j: usize, z: Complex64) -> Ray {
    let mut v = CVector::zeros(n);
    v[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    v[j] = z * FRAC_1_SQRT_2;
    Ray::new(v).expect("nonzero")
}

/// The rays a table must cover for reconstruction: the basis rays `[e_j]`,
/// the sums `[e_1 + e_j]` for `j >= 2`, and the twist `[e_1 + i e_2]`.
pub fn anchor_rays(n: usize) -> Vec<Ray> {
    let mut rays: Vec<Ray> = (0..n).map(|j| Ray::basis(n, j)).collect();
    rays.extend((1..n).map(|j| anchor_sum(n, j, Complex64::new(1.0, 0.0))));
    rays.push(anchor_sum(n, 1, Complex64::i()));
    rays
}

fn anchor_name(n: usize, idx: usize) -> String {
    if idx < n {
        format!("[e_{}]", idx + 1)
    } else if idx < 2 * n - 1 {
        format!("[e_1 + e_{}]", idx - n + 2)
    } else {
        "[e_1 + i e_2]".to_string()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReconstructionResult {
    #[serde(with = "crate::format::matrix")]
    pub matrix: CMatrix,
    pub class: OperatorClass,
    /// Largest ray distance between a table image and the reconstructed image.
    pub residual: f64,
    /// Per-entry ray distances, in table order.
    pub certificate: Vec<f64>,
}

impl ReconstructionResult {
    pub fn isometry(&self) -> Isometry {
        Isometry::from_parts_unchecked(self.matrix.clone(), self.class)
    }

    pub fn apply_ray(&self, r: &Ray) -> Ray {
        self.isometry().apply_ray(r)
    }
}

fn ray_of(v: CVector) -> Result<Ray> {
    Ray::new(v)
}

/// Steps (1)-(4) of the reconstruction plus the certificate over every table
/// entry; the residual is reported but not thresholded.
pub fn fit_from_anchors(table: &RayMapTable, tol: &Tolerance) -> Result<ReconstructionResult> {
    let n = table.ambient();
    let anchors = anchor_rays(n);
    let images: Vec<&Ray> = anchors
        .iter()
        .enumerate()
        .map(|(i, a)| {
            table
                .lookup(a, tol)
                .ok_or_else(|| Error::MissingRay(anchor_name(n, i)))
        })
        .collect::<Result<_>>()?;

    let mut u: Vec<CVector> = images[..n].iter().map(|r| r.vector().clone()).collect();
    for i in 0..n {
        for j in i + 1..n {
            let overlap = inner_unchecked(&u[i], &u[j]).norm();
            if overlap >= tol.eps_orth {
                return Err(Error::NotOrthogonalityPreserving(format!(
                    "images of [e_{}] and [e_{}] overlap by {overlap:.3e}",
                    i + 1,
                    j + 1
                )));
            }
        }
    }

    // Fix the phase of u_j so that f([e_1 + e_j]) = [u_1 + u_j].
    for j in 1..n {
        let w = images[n + j - 1].vector();
        let a = inner_unchecked(w, &u[0]);
        let b = inner_unchecked(w, &u[j]);
        if a.norm() < tol.eps_orth || b.norm() < tol.eps_orth {
            return Err(Error::NotInducedByIsometry(format!(
                "image of {} is orthogonal to an image of a basis ray",
                anchor_name(n, n + j - 1)
            )));
        }
        let lambda = b / a;
        let lambda = lambda / lambda.norm();
        u[j] *= lambda;
        let predicted = ray_of(&u[0] + &u[j])?;
        let dev = predicted.distance(images[n + j - 1]);
        if dev >= tol.eps_reconstruct {
            return Err(Error::NotInducedByIsometry(format!(
                "image of {} is {dev:.3e} away from the span of its basis images",
                anchor_name(n, n + j - 1)
            )));
        }
    }

    let twist = images[2 * n - 1];
    let i = Complex64::i();
    let as_linear = ray_of(&u[0] + &u[1] * i)?.distance(twist);
    let as_conjugate = ray_of(&u[0] - &u[1] * i)?.distance(twist);
    let class = if as_linear < tol.eps_reconstruct {
        OperatorClass::Linear
    } else if as_conjugate < tol.eps_reconstruct {
        OperatorClass::ConjugateLinear
    } else {
        return Err(Error::NotInducedByIsometry(format!(
            "image of [e_1 + i e_2] matches neither class (distances {as_linear:.3e}, {as_conjugate:.3e})"
        )));
    };

    let matrix = CMatrix::from_columns(&u);
    let iso = Isometry::from_parts_unchecked(matrix.clone(), class);
    let certificate: Vec<f64> = table
        .pairs()
        .iter()
        .map(|(s, img)| iso.apply_ray(s).distance(img))
        .collect();
    let residual = certificate.iter().copied().fold(0.0, f64::max);
    Ok(ReconstructionResult {
        matrix,
        class,
        residual,
        certificate,
    })
}

/// Recovers the isometry inducing `table`, failing when any entry deviates
/// from it by `eps_reconstruct` or more.
pub fn classify_and_reconstruct(
    table: &RayMapTable,
    tol: &Tolerance,
) -> Result<ReconstructionResult> {
    let result = fit_from_anchors(table, tol)?;
    if result.residual >= tol.eps_reconstruct {
        let worst = result
            .certificate
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map_or(0, |(i, _)| i);
        return Err(Error::TableInconsistent {
            residual: result.residual,
            worst,
        });
    }
    Ok(result)
}

/// Recomputes every table entry against `result`; violations name the entry.
pub fn verify_induced(
    table: &RayMapTable,
    result: &ReconstructionResult,
    tol: &Tolerance,
) -> CheckReport {
    let iso = result.isometry();
    let violations = table
        .pairs()
        .iter()
        .enumerate()
        .filter_map(|(i, (s, img))| {
            let dev = if s.ambient() == iso.dim() {
                iso.apply_ray(s).distance(img)
            } else {
                f64::INFINITY
            };
            (dev >= tol.eps_reconstruct)
                .then(|| Violation::new(vec![i], format!("image deviates by {dev:.3e}")))
        })
        .collect();
    CheckReport::from_violations("induced-by-isometry", violations)
}

/// A deterministic transformation of `G_k(C^n)`.
pub trait GrassmannOracle {
    fn ambient(&self) -> usize;
    fn k(&self) -> usize;
    fn evaluate(&self, x: &Subspace) -> Result<Subspace>;
}

impl<T: GrassmannOracle + ?Sized> GrassmannOracle for &T {
    fn ambient(&self) -> usize {
        (**self).ambient()
    }
    fn k(&self) -> usize {
        (**self).k()
    }
    fn evaluate(&self, x: &Subspace) -> Result<Subspace> {
        (**self).evaluate(x)
    }
}

impl<T: GrassmannOracle + ?Sized> GrassmannOracle for Rc<T> {
    fn ambient(&self) -> usize {
        (**self).ambient()
    }
    fn k(&self) -> usize {
        (**self).k()
    }
    fn evaluate(&self, x: &Subspace) -> Result<Subspace> {
        (**self).evaluate(x)
    }
}

fn check_input(o: &impl GrassmannOracle, x: &Subspace) -> Result<()> {
    if x.ambient() != o.ambient() {
        return Err(Error::DimensionMismatch {
            expected: o.ambient(),
            found: x.ambient(),
        });
    }
    if x.dim() != o.k() {
        return Err(Error::DimensionMismatch {
            expected: o.k(),
            found: x.dim(),
        });
    }
    Ok(())
}

/// `X -> L(X)` for an isometry `L`.
#[derive(Clone, Debug)]
pub struct InducedOracle {
    iso: Isometry,
    k: usize,
}

impl InducedOracle {
    pub fn new(iso: Isometry, k: usize) -> Result<Self> {
        if k == 0 || k > iso.dim() {
            return Err(Error::Precondition(format!(
                "k = {k} is out of range for C^{}",
                iso.dim()
            )));
        }
        Ok(Self { iso, k })
    }

    pub fn isometry(&self) -> &Isometry {
        &self.iso
    }
}

impl GrassmannOracle for InducedOracle {
    fn ambient(&self) -> usize {
        self.iso.dim()
    }
    fn k(&self) -> usize {
        self.k
    }
    fn evaluate(&self, x: &Subspace) -> Result<Subspace> {
        check_input(self, x)?;
        Ok(self.iso.apply_subspace(x))
    }
}

/// Sends every `k`-subspace to one fixed value.
#[derive(Clone, Debug)]
pub struct ConstantOracle {
    value: Subspace,
}

impl ConstantOracle {
    pub fn new(value: Subspace) -> Self {
        Self { value }
    }
}

impl GrassmannOracle for ConstantOracle {
    fn ambient(&self) -> usize {
        self.value.ambient()
    }
    fn k(&self) -> usize {
        self.value.dim()
    }
    fn evaluate(&self, x: &Subspace) -> Result<Subspace> {
        check_input(self, x)?;
        Ok(self.value.clone())
    }
}

/// A finite table of `(source, image)` subspaces; queries off the table fail
/// with [`Error::OracleMiss`].
#[derive(Clone, Debug)]
pub struct TabulatedOracle {
    n: usize,
    k: usize,
    pairs: Vec<(Subspace, Subspace)>,
    tol: Tolerance,
}

impl TabulatedOracle {
    pub fn new(pairs: Vec<(Subspace, Subspace)>, tol: Tolerance) -> Result<Self> {
        let (n, k) = pairs
            .first()
            .map(|(s, _)| (s.ambient(), s.dim()))
            .ok_or_else(|| Error::Format("empty subspace table".into()))?;
        for (s, i) in &pairs {
            for x in [s, i] {
                if x.ambient() != n || x.dim() != k {
                    return Err(Error::DimensionMismatch {
                        expected: k,
                        found: x.dim(),
                    });
                }
            }
        }
        Ok(Self { n, k, pairs, tol })
    }

    pub fn pairs(&self) -> &[(Subspace, Subspace)] {
        &self.pairs
    }
}

impl GrassmannOracle for TabulatedOracle {
    fn ambient(&self) -> usize {
        self.n
    }
    fn k(&self) -> usize {
        self.k
    }
    fn evaluate(&self, x: &Subspace) -> Result<Subspace> {
        check_input(self, x)?;
        self.pairs
            .iter()
            .find(|(s, _)| s.approx_eq(x, &self.tol))
            .map(|(_, i)| i.clone())
            .ok_or(Error::OracleMiss)
    }
}

/// Caches another oracle, keyed by the projection of the query rounded to 12
/// decimals.
pub struct Memoized<O> {
    inner: O,
    cache: Mutex<HashMap<Vec<i64>, Subspace>>,
}

impl<O: GrassmannOracle> Memoized<O> {
    pub fn new(inner: O) -> Self {
        Self {
            inner,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn cached(&self) -> usize {
        self.cache.lock().expect("cache lock").len()
    }
}

fn projection_key(x: &Subspace) -> Vec<i64> {
    x.projection()
        .iter()
        .flat_map(|z| [z.re, z.im])
        .map(|v| (v * 1e12).round() as i64)
        .collect()
}

impl<O: GrassmannOracle> GrassmannOracle for Memoized<O> {
    fn ambient(&self) -> usize {
        self.inner.ambient()
    }
    fn k(&self) -> usize {
        self.inner.k()
    }
    fn evaluate(&self, x: &Subspace) -> Result<Subspace> {
        let key = projection_key(x);
        if let Some(hit) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let value = self.inner.evaluate(x)?;
        self.cache
            .lock()
            .expect("cache lock")
            .insert(key, value.clone());
        Ok(value)
    }
}

pub const DEFAULT_PROBES: usize = 3;
pub const PROBE_RETRIES: usize = 20;

/// Evaluates `f` on members of the star of `x` until `probes` pairwise
/// distinct images are found (with up to [`PROBE_RETRIES`] extra draws) and
/// returns their common `(k-1)`-subspace.
pub fn descend_star(
    f: &dyn GrassmannOracle,
    x: &Subspace,
    probes: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<Subspace> {
    let k = f.k();
    if k < 2 {
        return Err(Error::Precondition("star descent needs k >= 2".into()));
    }
    if probes < 2 {
        return Err(Error::TooFewSamples {
            min: 2,
            got: probes,
        });
    }
    if x.ambient() != f.ambient() || x.dim() != k - 1 {
        return Err(Error::DimensionMismatch {
            expected: k - 1,
            found: x.dim(),
        });
    }
    let perp = complement(x)?;
    let mut rng = seeded(seed);
    let mut images: Vec<Subspace> = Vec::with_capacity(probes);
    let mut draws = 0;
    while images.len() < probes && draws < probes + PROBE_RETRIES {
        draws += 1;
        let member = sum(x, &random_ray_in(&perp, &mut rng).as_subspace(), tol)?;
        let image = f.evaluate(&member)?;
        if image.dim() != k {
            return Err(Error::StarDescent(format!(
                "image has dimension {} instead of {k}",
                image.dim()
            )));
        }
        if images.iter().all(|m| !m.approx_eq(&image, tol)) {
            images.push(image);
        }
    }
    if images.len() < 2 {
        return Err(Error::StarDescent(format!(
            "only {} distinct image(s) after {draws} probes",
            images.len()
        )));
    }
    let mut meet = images[0].clone();
    for img in &images[1..] {
        meet = intersect(&meet, img, tol)?
            .ok_or_else(|| Error::StarDescent("probed images meet trivially".into()))?;
    }
    if meet.dim() != k - 1 {
        return Err(Error::StarDescent(format!(
            "probed images meet in dimension {} instead of {}",
            meet.dim(),
            k - 1
        )));
    }
    for img in &images {
        let dev = img.containment_deviation(&meet);
        if dev >= tol.eps_eq {
            return Err(Error::StarDescent(format!(
                "common subspace leaves a probed image by {dev:.3e}"
            )));
        }
    }
    Ok(meet)
}

/// `f_{k-1}` synthesized from `f_k` by [`descend_star`] with a fixed seed.
pub struct StarDescended<'a> {
    parent: Rc<dyn GrassmannOracle + 'a>,
    probes: usize,
    seed: u64,
    tol: Tolerance,
}

impl<'a> StarDescended<'a> {
    pub fn new(
        parent: Rc<dyn GrassmannOracle + 'a>,
        probes: usize,
        seed: u64,
        tol: Tolerance,
    ) -> Self {
        Self {
            parent,
            probes,
            seed,
            tol,
        }
    }
}

impl GrassmannOracle for StarDescended<'_> {
    fn ambient(&self) -> usize {
        self.parent.ambient()
    }
    fn k(&self) -> usize {
        self.parent.k() - 1
    }
    fn evaluate(&self, x: &Subspace) -> Result<Subspace> {
        descend_star(&*self.parent, x, self.probes, self.seed, &self.tol)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DescentConfig {
    pub probes: usize,
    pub seed: u64,
    /// Sampled `Y` per level for the containment check.
    pub level_samples: usize,
    /// Extra random rays tabulated beside the anchor rays.
    pub audit_rays: usize,
    /// Fresh `k`-subspaces compared against `f` after reconstruction.
    pub consistency_samples: usize,
}

impl Default for DescentConfig {
    fn default() -> Self {
        Self {
            probes: DEFAULT_PROBES,
            seed: 0,
            level_samples: 20,
            audit_rays: 20,
            consistency_samples: 50,
        }
    }
}

/// Containment `f_j(G_j(Y)) ⊆ G_j(f_{j+1}(Y))` on sampled `Y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelCheck {
    pub level: usize,
    pub samples: usize,
    pub max_deviation: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DescentOutcome {
    pub reconstruction: ReconstructionResult,
    pub levels: Vec<LevelCheck>,
    /// Largest `||P_{L(X)} - P_{f(X)}||_F` over the consistency sample.
    pub consistency_max: f64,
    pub pass: bool,
}

pub fn descend_full(
    f: &dyn GrassmannOracle,
    config: &DescentConfig,
    tol: &Tolerance,
) -> Result<DescentOutcome> {
    let n = f.ambient();
    let k = f.k();
    if k < 2 || 2 * k >= n {
        return Err(Error::Precondition(format!(
            "descent needs n > 2k > 2, got n = {n}, k = {k}"
        )));
    }
    // chain[0] = f_k, chain[i] = f_{k-i}
    let mut chain: Vec<Rc<dyn GrassmannOracle + '_>> = vec![Rc::new(f)];
    for level in (1..k).rev() {
        let parent = Rc::clone(chain.last().expect("nonempty"));
        let seed = derive_seed(config.seed, level as u64);
        chain.push(Rc::new(Memoized::new(StarDescended::new(
            parent,
            config.probes,
            seed,
            *tol,
        ))));
    }

    let mut rng = seeded(derive_seed(config.seed, 0xC0_17A1));
    let mut levels = Vec::with_capacity(k - 1);
    for (i, pair) in chain.windows(2).enumerate() {
        let upper = &pair[0];
        let lower = &pair[1];
        let j = k - i - 1;
        let mut max_deviation: f64 = 0.0;
        for _ in 0..config.level_samples {
            let y = random_subspace(n, j + 1, &mut rng);
            let fy = upper.evaluate(&y)?;
            let z = random_subspace_of(&y, j, &mut rng);
            let fz = lower.evaluate(&z)?;
            max_deviation = max_deviation.max(fy.containment_deviation(&fz));
        }
        levels.push(LevelCheck {
            level: j,
            samples: config.level_samples,
            max_deviation,
            pass: max_deviation < tol.eps_eq,
        });
    }

    let rays_oracle = chain.last().expect("nonempty");
    let mut sources = anchor_rays(n);
    sources.extend((0..config.audit_rays).map(|_| random_ray(n, &mut rng)));
    let mut table = RayMapTable::new(n)?;
    for s in &sources {
        if table.index_of(s, tol).is_some() {
            continue;
        }
        let image = rays_oracle.evaluate(&s.as_subspace())?;
        table.insert(s.clone(), Ray::new(image.column(0))?, tol)?;
    }
    let reconstruction = classify_and_reconstruct(&table, tol)?;

    let iso = reconstruction.isometry();
    let mut consistency_max: f64 = 0.0;
    for _ in 0..config.consistency_samples {
        let x = random_subspace(n, k, &mut rng);
        let dev = iso.apply_subspace(&x).distance(&f.evaluate(&x)?);
        consistency_max = consistency_max.max(dev);
    }
    if consistency_max >= tol.eps_reconstruct {
        return Err(Error::NotInducedByIsometry(format!(
            "reconstructed operator misses f by {consistency_max:.3e} on sampled {k}-subspaces"
        )));
    }
    let pass = levels.iter().all(|l| l.pass);
    Ok(DescentOutcome {
        reconstruction,
        levels,
        consistency_max,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionsReport {
    pub check: String,
    pub samples: usize,
    pub orthogonality_preserving: bool,
    /// Ortho-adjacent pairs go to ortho-adjacent pairs.
    pub a_pass: bool,
    /// Adjacent pairs go to adjacent or equal pairs.
    pub b_pass: bool,
    pub violations: Vec<Violation>,
}

/// The hyperplane of `x` orthogonal to the ray `r ⊂ x`, extended by `s`.
fn swap_direction(x: &Subspace, r: &Ray, s: &Ray, tol: &Tolerance) -> Result<Subspace> {
    let rest: Vec<CVector> = complement(&r.as_subspace())?
        .columns()
        .into_iter()
        .map(|c| x.projection() * c)
        .collect();
    let mut cols: Vec<CVector> = match Subspace::span(&rest, tol) {
        Ok(h) => h.columns(),
        Err(Error::EmptySpan) => Vec::new(),
        Err(e) => return Err(e),
    };
    cols.push(s.vector().clone());
    Subspace::span(&cols, tol)
}

/// Samples orthogonal, ortho-adjacent, and adjacent pairs and checks how `f`
/// treats each kind.
pub fn check_conditions_ab(
    f: &dyn GrassmannOracle,
    samples: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<ConditionsReport> {
    let n = f.ambient();
    let k = f.k();
    if 2 * k >= n {
        return Err(Error::Precondition(format!(
            "conditions (A)/(B) need n > 2k, got n = {n}, k = {k}"
        )));
    }
    let mut rng = seeded(seed);
    let mut violations = Vec::new();
    let (mut orth_ok, mut a_ok, mut b_ok) = (true, true, true);
    for i in 0..samples {
        let (x, y) = orthogonal_pair(n, k, &mut rng)?;
        if !is_orthogonal(&f.evaluate(&x)?, &f.evaluate(&y)?, tol)? {
            orth_ok = false;
            violations.push(Violation::new(
                vec![i],
                "orthogonal pair has non-orthogonal images",
            ));
        }

        let x = random_subspace(n, k, &mut rng);
        let r = random_ray_in(&x, &mut rng);
        let s = random_ray_in(&complement(&x)?, &mut rng);
        let y = swap_direction(&x, &r, &s, tol)?;
        let verdict = is_ortho_adjacent(&f.evaluate(&x)?, &f.evaluate(&y)?, tol);
        if !matches!(verdict, Ok(true)) {
            a_ok = false;
            let detail = match verdict {
                Err(e) => format!("ortho-adjacent pair: {e}"),
                _ => "ortho-adjacent pair has images that are not ortho-adjacent".to_string(),
            };
            violations.push(Violation::new(vec![i], detail));
        }

        let x = random_subspace(n, k, &mut rng);
        let r = random_ray_in(&x, &mut rng);
        let s = random_ray(n, &mut rng);
        let y = swap_direction(&x, &r, &s, tol)?;
        let (fx, fy) = (f.evaluate(&x)?, f.evaluate(&y)?);
        if !(fx.approx_eq(&fy, tol) || is_adjacent(&fx, &fy, tol)?) {
            b_ok = false;
            violations.push(Violation::new(
                vec![i],
                "adjacent pair has images that are neither adjacent nor equal",
            ));
        }
    }
    Ok(ConditionsReport {
        check: "conditions-ab".into(),
        samples,
        orthogonality_preserving: orth_ok,
        a_pass: a_ok,
        b_pass: b_ok,
        violations,
    })
}
