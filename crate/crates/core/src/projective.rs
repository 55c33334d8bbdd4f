//! The projective space `P(C^n)`: orthogonality and transition probability of
//! rays, lines, and finite checks on tabulated ray maps (orthogonality
//! preservation, the lineation property, non-degeneracy).
//!
//! A line is quantified over all of its rays; the checks here work on finite,
//! seeded samples of each line plus whatever tabulated rays lie on it.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{complement, inner, numerical_rank, CMatrix, CVector, Ray, Subspace};
use crate::isometry::Isometry;
use crate::report::{CheckReport, Violation};
use crate::sampling::{gaussian_vector, seeded};
use crate::tolerance::Tolerance;

/// Minimum projection distance between rays returned by [`sample_line`].
const SAMPLE_SEPARATION: f64 = 1e-6;

fn same_ambient(p: &Ray, q: &Ray) -> Result<()> {
    if p.ambient() != q.ambient() {
        return Err(Error::DimensionMismatch {
            expected: p.ambient(),
            found: q.ambient(),
        });
    }
    Ok(())
}

pub fn ray_orthogonal(p: &Ray, q: &Ray, tol: &Tolerance) -> Result<bool> {
    Ok(inner(p.vector(), q.vector())?.norm() < tol.eps_orth)
}

/// `|<p, q>|^2`, which equals `trace(P_p P_q)`.
pub fn transition_probability(p: &Ray, q: &Ray) -> Result<f64> {
    Ok(inner(p.vector(), q.vector())?.norm_sqr().clamp(0.0, 1.0))
}

/// The set of rays inside a 2-dimensional subspace.
#[derive(Clone, Debug)]
pub struct Line {
    carrier: Subspace,
}

impl Line {
    pub fn new(carrier: Subspace) -> Result<Self> {
        if carrier.dim() != 2 {
            return Err(Error::Precondition(format!(
                "a line needs a 2-dimensional carrier, got dimension {}",
                carrier.dim()
            )));
        }
        Ok(Self { carrier })
    }

    pub fn carrier(&self) -> &Subspace {
        &self.carrier
    }

    pub fn ambient(&self) -> usize {
        self.carrier.ambient()
    }

    pub fn contains(&self, r: &Ray, tol: &Tolerance) -> bool {
        self.carrier.vector_deviation(r.vector()) < tol.eps_eq
    }

    /// The two canonical basis rays of the carrier.
    pub fn basis_rays(&self) -> [Ray; 2] {
        let b = self.carrier.canonical_basis();
        [
            Ray::new(b[0].clone()).expect("unit vector"),
            Ray::new(b[1].clone()).expect("unit vector"),
        ]
    }
}

pub fn line_through(p: &Ray, q: &Ray, tol: &Tolerance) -> Result<Line> {
    same_ambient(p, q)?;
    if p.approx_eq(q, tol) {
        return Err(Error::CoincidentRays);
    }
    let carrier = Subspace::span(&[p.vector().clone(), q.vector().clone()], tol)?;
    Line::new(carrier)
}

/// `m` distinct rays of `l`: its two canonical basis rays followed by `m - 2`
/// seeded random combinations of them.
pub fn sample_line(l: &Line, m: usize, seed: u64) -> Result<Vec<Ray>> {
    if m < 3 {
        return Err(Error::TooFewSamples { min: 3, got: m });
    }
    let [b0, b1] = l.basis_rays();
    let mut rng = seeded(seed);
    let mut out = vec![b0, b1];
    while out.len() < m {
        let c = gaussian_vector(2, &mut rng);
        let v = out[0].vector() * c[0] + out[1].vector() * c[1];
        let Ok(r) = Ray::new(v) else { continue };
        if out.iter().all(|q| q.distance(&r) >= SAMPLE_SEPARATION) {
            out.push(r);
        }
    }
    Ok(out)
}

/// Orthonormal rays spanning the orthogonal complement of a line's carrier.
pub fn complement_frame(l: &Line) -> Result<Vec<Ray>> {
    complement(l.carrier())?
        .canonical_basis()
        .into_iter()
        .map(Ray::new)
        .collect()
}

/// A finite transformation of `P(C^n)` given as `(source, image)` pairs.
#[derive(Clone, Debug)]
pub struct RayMapTable {
    n: usize,
    pairs: Vec<(Ray, Ray)>,
}

impl RayMapTable {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Precondition(format!(
                "ray tables need ambient dimension >= 3, got {n}"
            )));
        }
        Ok(Self {
            n,
            pairs: Vec::new(),
        })
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(Ray, Ray)] {
        &self.pairs
    }

    pub fn index_of(&self, source: &Ray, tol: &Tolerance) -> Option<usize> {
        self.pairs
            .iter()
            .position(|(s, _)| s.distance(source) < tol.eps_eq)
    }

    pub fn lookup(&self, source: &Ray, tol: &Tolerance) -> Option<&Ray> {
        self.index_of(source, tol).map(|i| &self.pairs[i].1)
    }

    pub fn insert(&mut self, source: Ray, image: Ray, tol: &Tolerance) -> Result<usize> {
        for r in [&source, &image] {
            if r.ambient() != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    found: r.ambient(),
                });
            }
        }
        if let Some(i) = self.index_of(&source, tol) {
            return Err(Error::DuplicateSource(i));
        }
        self.pairs.push((source, image));
        Ok(self.pairs.len() - 1)
    }

    /// Replaces the image of an existing entry.
    pub fn set_image(&mut self, index: usize, image: Ray) -> Result<()> {
        if image.ambient() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: image.ambient(),
            });
        }
        let slot = self
            .pairs
            .get_mut(index)
            .ok_or_else(|| Error::MissingRay(format!("table index {index}")))?;
        slot.1 = image;
        Ok(())
    }

    /// Tabulates `f` on `sources`, silently skipping repeated sources.
    pub fn from_fn<'a>(
        n: usize,
        sources: impl IntoIterator<Item = &'a Ray>,
        tol: &Tolerance,
        mut f: impl FnMut(&Ray) -> Ray,
    ) -> Result<Self> {
        let mut table = Self::new(n)?;
        for s in sources {
            if table.index_of(s, tol).is_none() {
                let image = f(s);
                table.insert(s.clone(), image, tol)?;
            }
        }
        Ok(table)
    }

    pub fn induced_by<'a>(
        iso: &Isometry,
        sources: impl IntoIterator<Item = &'a Ray>,
        tol: &Tolerance,
    ) -> Result<Self> {
        Self::from_fn(iso.dim(), sources, tol, |r| iso.apply_ray(r))
    }
}

pub fn check_orthogonality_preserving(f: &RayMapTable, tol: &Tolerance) -> CheckReport {
    let mut violations = Vec::new();
    let pairs = f.pairs();
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            let src = inner(pairs[i].0.vector(), pairs[j].0.vector()).map(|z| z.norm());
            let img = inner(pairs[i].1.vector(), pairs[j].1.vector()).map(|z| z.norm());
            if let (Ok(src), Ok(img)) = (src, img) {
                if src < tol.eps_orth && img >= tol.eps_orth {
                    violations.push(Violation::new(
                        vec![i, j],
                        format!("sources orthogonal, images overlap |<f(p),f(q)>| = {img:.3e}"),
                    ));
                }
            }
        }
    }
    CheckReport::from_violations("orthogonality-preserving", violations)
}

/// Image carrier of a line under an orthogonality-preserving map: the
/// orthogonal complement of the images of `n - 2` mutually orthogonal
/// tabulated rays spanning the line's complement.
pub fn induced_line_image(f: &RayMapTable, s: &Line, tol: &Tolerance) -> Result<Line> {
    let n = f.ambient();
    if s.ambient() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: s.ambient(),
        });
    }
    let carrier = s.carrier().basis();
    let mut frame: Vec<usize> = Vec::with_capacity(n - 2);
    for (i, (src, _)) in f.pairs().iter().enumerate() {
        if frame.len() == n - 2 {
            break;
        }
        let off_line = (carrier.adjoint() * src.vector()).norm() < tol.eps_orth;
        let fresh = frame
            .iter()
            .all(|&j| inner_norm(f.pairs()[j].0.vector(), src.vector()) < tol.eps_orth);
        if off_line && fresh {
            frame.push(i);
        }
    }
    if frame.len() < n - 2 {
        return Err(Error::MissingRay(format!(
            "table holds only {} of the {} mutually orthogonal rays needed to span the line's complement",
            frame.len(),
            n - 2
        )));
    }
    let images: Vec<CVector> = frame
        .iter()
        .map(|&i| f.pairs()[i].1.vector().clone())
        .collect();
    for a in 0..images.len() {
        for b in a + 1..images.len() {
            if inner_norm(&images[a], &images[b]) >= tol.eps_orth {
                return Err(Error::NotOrthogonalityPreserving(format!(
                    "on the line's complement: images of table entries {} and {} are not orthogonal",
                    frame[a], frame[b]
                )));
            }
        }
    }
    let image_carrier = if images.is_empty() {
        Subspace::full(n)
    } else {
        complement(&Subspace::span(&images, tol)?)?
    };
    if image_carrier.dim() != 2 {
        return Err(Error::NotOrthogonalityPreserving(format!(
            "on the line's complement: image complement has dimension {}",
            image_carrier.dim()
        )));
    }
    Line::new(image_carrier)
}

fn inner_norm(x: &CVector, y: &CVector) -> f64 {
    x.iter()
        .zip(y.iter())
        .map(|(a, b)| a * b.conj())
        .sum::<Complex64>()
        .norm()
}

/// A line together with the source rays on it that a check should examine.
#[derive(Clone, Debug)]
pub struct LineSample {
    pub line: Line,
    pub members: Vec<Ray>,
}

impl LineSample {
    /// A seeded sample of `m` rays on `line`.
    pub fn sampled(line: Line, m: usize, seed: u64) -> Result<Self> {
        let members = sample_line(&line, m, seed)?;
        Ok(Self { line, members })
    }
}

fn member_images<'a>(
    f: &'a RayMapTable,
    sample: &LineSample,
    line_index: usize,
    tol: &Tolerance,
) -> Result<Vec<&'a Ray>> {
    if sample.members.len() < 3 {
        return Err(Error::Precondition(format!(
            "line {line_index} lists {} member rays, at least 3 are needed",
            sample.members.len()
        )));
    }
    sample
        .members
        .iter()
        .enumerate()
        .map(|(m, r)| {
            if !sample.line.contains(r, tol) {
                return Err(Error::Precondition(format!(
                    "member {m} of line {line_index} is not on the line"
                )));
            }
            f.lookup(r, tol).ok_or_else(|| {
                Error::MissingRay(format!("member {m} of line {line_index} is not tabulated"))
            })
        })
        .collect()
}

fn stacked(images: &[&Ray]) -> CMatrix {
    let cols: Vec<CVector> = images.iter().map(|r| r.vector().clone()).collect();
    CMatrix::from_columns(&cols)
}

/// Passes iff each line's member images span at most two dimensions.
pub fn check_lineation(
    f: &RayMapTable,
    lines: &[LineSample],
    tol: &Tolerance,
) -> Result<CheckReport> {
    let mut violations = Vec::new();
    for (li, sample) in lines.iter().enumerate() {
        let images = member_images(f, sample, li, tol)?;
        let rank = numerical_rank(&stacked(&images), tol);
        if rank > 2 {
            violations.push(Violation::new(
                vec![li],
                format!("images of the line's rays span rank {rank}"),
            ));
        }
    }
    Ok(CheckReport::from_violations("lineation", violations))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NondegeneracyReport {
    pub check: String,
    pub pass: bool,
    /// Image not contained in a line.
    pub l1_pass: bool,
    /// Every listed line has at least three distinct image rays.
    pub l2_pass: bool,
    pub image_rank: usize,
    pub distinct_images_per_line: Vec<usize>,
    pub violations: Vec<Violation>,
}

fn count_distinct(rays: &[&Ray], tol: &Tolerance) -> usize {
    let mut reps: Vec<&Ray> = Vec::new();
    for r in rays {
        if reps.iter().all(|q| q.distance(r) >= tol.eps_eq) {
            reps.push(r);
        }
    }
    reps.len()
}

pub fn check_nondegenerate(
    f: &RayMapTable,
    lines: &[LineSample],
    tol: &Tolerance,
) -> Result<NondegeneracyReport> {
    let all: Vec<&Ray> = f.pairs().iter().map(|(_, img)| img).collect();
    let image_rank = if all.is_empty() {
        0
    } else {
        numerical_rank(&stacked(&all), tol)
    };
    let mut violations = Vec::new();
    let l1_pass = image_rank >= 3;
    if !l1_pass {
        violations.push(Violation::new(
            vec![],
            format!("all images lie in a subspace of dimension {image_rank}"),
        ));
    }
    let mut distinct_images_per_line = Vec::with_capacity(lines.len());
    for (li, sample) in lines.iter().enumerate() {
        let images = member_images(f, sample, li, tol)?;
        let distinct = count_distinct(&images, tol);
        if distinct < 3 {
            violations.push(Violation::new(
                vec![li],
                format!("line image has only {distinct} distinct rays"),
            ));
        }
        distinct_images_per_line.push(distinct);
    }
    let l2_pass = distinct_images_per_line.iter().all(|&d| d >= 3);
    Ok(NondegeneracyReport {
        check: "nondegenerate".into(),
        pass: l1_pass && l2_pass,
        l1_pass,
        l2_pass,
        image_rank,
        distinct_images_per_line,
        violations,
    })
}

/// Lines through at least three tabulated source rays, found by scanning
/// all source pairs.
pub fn lines_in_table(f: &RayMapTable, tol: &Tolerance) -> Vec<LineSample> {
    let sources: Vec<&Ray> = f.pairs().iter().map(|(s, _)| s).collect();
    let mut found: Vec<LineSample> = Vec::new();
    for i in 0..sources.len() {
        for j in i + 1..sources.len() {
            let Ok(line) = line_through(sources[i], sources[j], tol) else {
                continue;
            };
            if found
                .iter()
                .any(|ls| ls.line.carrier().approx_eq(line.carrier(), tol))
            {
                continue;
            }
            let members: Vec<Ray> = sources
                .iter()
                .filter(|r| line.contains(r, tol))
                .map(|r| (*r).clone())
                .collect();
            if members.len() >= 3 {
                found.push(LineSample { line, members });
            }
        }
    }
    found
}

/// Seeded family of random lines in `C^n`, each sampled with `m` rays.
pub fn random_line_family(
    n: usize,
    count: usize,
    m: usize,
    rng: &mut impl Rng,
) -> Result<Vec<LineSample>> {
    (0..count)
        .map(|_| {
            let carrier = crate::sampling::random_subspace(n, 2, rng);
            let seed: u64 = rng.random();
            LineSample::sampled(Line::new(carrier)?, m, seed)
        })
        .collect()
}

/// Table of `f` on every member of every line, plus the complement frames used
/// by [`induced_line_image`].
pub fn tabulate_lines(
    n: usize,
    lines: &[LineSample],
    tol: &Tolerance,
    f: impl FnMut(&Ray) -> Ray,
) -> Result<RayMapTable> {
    let sources: Vec<Ray> = lines
        .iter()
        .flat_map(|l| l.members.iter().cloned())
        .collect();
    RayMapTable::from_fn(n, sources.iter(), tol, f)
}
