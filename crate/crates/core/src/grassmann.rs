//! Grassmannians `G_k(C^n)` and the Grassmann graph: principal angles,
//! adjacency, compatibility, graph distance and geodesics, stars and tops with
//! their maximal compatible cliques, and the bridge construction used to pass
//! from ortho-adjacency to adjacency.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    complement, intersect, intersection_dim, singular_values, sorted_svd, sum, svd, CMatrix,
    CVector, Subspace, Svd,
};
use crate::sampling::{gaussian_vector, random_ray_in, seeded};
use crate::tolerance::Tolerance;

fn same_ambient(x: &Subspace, y: &Subspace) -> Result<()> {
    if x.ambient() != y.ambient() {
        return Err(Error::DimensionMismatch {
            expected: x.ambient(),
            found: y.ambient(),
        });
    }
    Ok(())
}

fn same_shape(x: &Subspace, y: &Subspace) -> Result<()> {
    same_ambient(x, y)?;
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(())
}

/// Principal angles `θ_1 <= ... <= θ_k` in `[0, π/2]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrincipalAngles {
    angles: Vec<f64>,
}

impl PrincipalAngles {
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// Number of angles above `eps_angle`.
    pub fn count_nonzero(&self, tol: &Tolerance) -> usize {
        self.angles.iter().filter(|&&t| t > tol.eps_angle).count()
    }

    /// True when some angle sits within a factor of ten of `eps_angle`, where
    /// the zero/nonzero classification is not trustworthy.
    pub fn marginal(&self, tol: &Tolerance) -> bool {
        self.angles
            .iter()
            .any(|&t| t >= tol.eps_angle / 10.0 && t <= tol.eps_angle * 10.0)
    }

    pub fn all_right(&self, tol: &Tolerance) -> bool {
        self.angles.iter().all(|&t| FRAC_PI_2 - t <= tol.eps_angle)
    }
}

/// Cosines come from the singular values of `B_X^* B_Y`. Angles whose cosine
/// exceeds `1/sqrt(2)` are recomputed from the singular values of
/// `(I - P_X) B_Y` (their sines), where `arccos` would lose half the digits.
pub fn principal_angles(x: &Subspace, y: &Subspace) -> Result<PrincipalAngles> {
    same_shape(x, y)?;
    let overlap = x.basis().adjoint() * y.basis();
    let cosines = singular_values(&overlap);
    let residual = y.basis() - x.basis() * &overlap;
    let mut sines = singular_values(&residual);
    sines.reverse();
    let mut angles: Vec<f64> = cosines
        .iter()
        .zip(sines.iter())
        .map(|(&c, &s)| {
            let c = c.clamp(0.0, 1.0);
            if c * c >= 0.5 {
                s.clamp(0.0, 1.0).asin()
            } else {
                c.acos()
            }
        })
        .map(|t| t.clamp(0.0, FRAC_PI_2))
        .collect();
    angles.sort_by(f64::total_cmp);
    Ok(PrincipalAngles { angles })
}

/// Exactly one principal angle is nonzero, i.e. `dim(X ∩ Y) = k - 1`.
pub fn is_adjacent(x: &Subspace, y: &Subspace, tol: &Tolerance) -> Result<bool> {
    Ok(principal_angles(x, y)?.count_nonzero(tol) == 1)
}

/// `|| P_X P_Y - P_Y P_X ||_F`.
pub fn commutator_norm(x: &Subspace, y: &Subspace) -> Result<f64> {
    same_ambient(x, y)?;
    let px = x.projection();
    let py = y.projection();
    Ok((&px * &py - &py * &px).norm())
}

/// The orthogonal projections commute. Dimensions may differ.
pub fn is_compatible(x: &Subspace, y: &Subspace, tol: &Tolerance) -> Result<bool> {
    Ok(commutator_norm(x, y)? < tol.eps_orth)
}

/// Compatibility read off the principal angles: every angle is `0` or `π/2`.
pub fn angles_compatible(x: &Subspace, y: &Subspace, tol: &Tolerance) -> Result<bool> {
    Ok(principal_angles(x, y)?
        .angles()
        .iter()
        .all(|&t| t <= tol.eps_angle || FRAC_PI_2 - t <= tol.eps_angle))
}

/// Adjacent with the single nonzero angle equal to `π/2`. The angle route is
/// cross-checked against `is_adjacent && is_compatible`.
pub fn is_ortho_adjacent(x: &Subspace, y: &Subspace, tol: &Tolerance) -> Result<bool> {
    let angles = principal_angles(x, y)?;
    let adjacent = angles.count_nonzero(tol) == 1;
    let by_angle = adjacent
        && angles
            .angles()
            .last()
            .is_some_and(|&t| FRAC_PI_2 - t <= tol.eps_angle);
    let by_commutator = adjacent && is_compatible(x, y, tol)?;
    if by_angle != by_commutator {
        return Err(Error::ToleranceBreakdown(format!(
            "angle test says {by_angle}, commutator test says {by_commutator} (angles {:?})",
            angles.angles()
        )));
    }
    Ok(by_angle)
}

/// Both subspaces are orthogonal (every principal angle is `π/2`).
pub fn is_orthogonal(x: &Subspace, y: &Subspace, tol: &Tolerance) -> Result<bool> {
    same_ambient(x, y)?;
    Ok((x.basis().adjoint() * y.basis()).norm() < tol.eps_orth)
}

/// Grassmann-graph distance `k - dim(X ∩ Y)`, checked against
/// `dim(X + Y) - k` and the number of nonzero principal angles.
pub fn grassmann_distance(x: &Subspace, y: &Subspace, tol: &Tolerance) -> Result<usize> {
    same_shape(x, y)?;
    let k = x.dim();
    let meet = intersection_dim(x, y, tol)?;
    let join = sum(x, y, tol)?.dim();
    let by_angles = principal_angles(x, y)?.count_nonzero(tol);
    let by_meet = k - meet.min(k);
    let by_join = join.saturating_sub(k);
    if by_meet != by_join || by_meet != by_angles {
        return Err(Error::RankInstability(format!(
            "k - dim(X∩Y) = {by_meet}, dim(X+Y) - k = {by_join}, nonzero angles = {by_angles}"
        )));
    }
    Ok(by_meet)
}

/// A path in the Grassmann graph.
#[derive(Clone, Debug)]
pub struct GrassmannPath {
    nodes: Vec<Subspace>,
}

impl GrassmannPath {
    pub fn nodes(&self) -> &[Subspace] {
        &self.nodes
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() <= 1
    }

    pub fn consecutive_adjacent(&self, tol: &Tolerance) -> Result<bool> {
        for w in self.nodes.windows(2) {
            if !is_adjacent(&w[0], &w[1], tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn pairwise_compatible(&self, tol: &Tolerance) -> Result<bool> {
        for i in 0..self.nodes.len() {
            for j in i + 1..self.nodes.len() {
                if !is_compatible(&self.nodes[i], &self.nodes[j], tol)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn unit(v: CVector) -> CVector {
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

/// Principal vector pairs `(x_i, y_i)` outside `X ∩ Y`, in ascending angle
/// order; directions sharing an angle are put in canonical basis order.
fn principal_pairs(
    x: &Subspace,
    y: &Subspace,
    tol: &Tolerance,
) -> Result<Vec<(f64, CVector, CVector)>> {
    let overlap = x.basis().adjoint() * y.basis();
    let Svd { u: w, v, .. } = svd(&overlap);
    let angles = principal_angles(x, y)?;

    // Group the non-intersection directions into clusters of equal angle.
    let mut clusters: Vec<(f64, Vec<usize>)> = Vec::new();
    for (idx, &theta) in angles.angles().iter().enumerate() {
        if theta <= tol.eps_angle {
            continue;
        }
        match clusters.last_mut() {
            Some((start, members)) if theta - *start <= tol.eps_angle => members.push(idx),
            _ => clusters.push((theta, vec![idx])),
        }
    }

    let mut pairs = Vec::new();
    for (theta, members) in clusters {
        let xs: Vec<CVector> = members.iter().map(|&i| x.basis() * w.column(i)).collect();
        let x_block = Subspace::span(&xs, tol)?.canonical_basis();
        if FRAC_PI_2 - theta <= tol.eps_angle {
            let ys: Vec<CVector> = members.iter().map(|&i| y.basis() * v.column(i)).collect();
            let y_block = Subspace::span(&ys, tol)?.canonical_basis();
            for (xv, yv) in x_block.into_iter().zip(y_block) {
                pairs.push((theta, xv, yv));
            }
        } else {
            let py = y.projection();
            for xv in x_block {
                let yv = unit(&py * &xv);
                pairs.push((theta, xv, yv));
            }
        }
    }
    Ok(pairs)
}

/// A shortest path from `X` to `Y`: keep `X ∩ Y`, pair the remaining
/// principal directions of `X` and `Y`, and swap one direction per step
/// starting from the largest angle.
pub fn geodesic(x: &Subspace, y: &Subspace, tol: &Tolerance) -> Result<GrassmannPath> {
    let d = grassmann_distance(x, y, tol)?;
    if d == 0 {
        return Ok(GrassmannPath {
            nodes: vec![x.clone()],
        });
    }
    let common: Vec<CVector> = match intersect(x, y, tol)? {
        Some(meet) => meet.canonical_basis(),
        None => Vec::new(),
    };
    let pairs = principal_pairs(x, y, tol)?;
    if pairs.len() != d || common.len() + d != x.dim() {
        return Err(Error::RankInstability(format!(
            "found {} principal pairs and {} common directions for distance {d}",
            pairs.len(),
            common.len()
        )));
    }
    let mut current: Vec<CVector> = pairs.iter().map(|(_, xv, _)| xv.clone()).collect();
    let mut nodes = vec![x.clone()];
    for step in 1..d {
        let idx = d - step;
        current[idx] = pairs[idx].2.clone();
        let mut cols = common.clone();
        cols.extend(current.iter().cloned());
        nodes.push(Subspace::span(&cols, tol)?);
    }
    nodes.push(y.clone());
    Ok(GrassmannPath { nodes })
}

/// For compatible `X, Y` with `n >= 2k`: a `Z ⊥ X` and a geodesic
/// `X -> Y -> Z` of length `k`. `Z` keeps `Y ⊖ (X ∩ Y)` and replaces `X ∩ Y`
/// by directions orthogonal to `X + Y`.
pub fn extend_to_orthogonal(
    x: &Subspace,
    y: &Subspace,
    tol: &Tolerance,
) -> Result<(Subspace, GrassmannPath)> {
    same_shape(x, y)?;
    let (n, k) = (x.ambient(), x.dim());
    if n < 2 * k {
        return Err(Error::Precondition(format!(
            "no {k}-subspace of C^{n} is orthogonal to another"
        )));
    }
    if !is_compatible(x, y, tol)? {
        return Err(Error::Precondition("subspaces are not compatible".into()));
    }
    let meet = intersect(x, y, tol)?;
    let m = meet.as_ref().map_or(0, Subspace::dim);
    let mut cols: Vec<CVector> = match &meet {
        None => y.columns(),
        Some(_) if m == k => Vec::new(),
        Some(meet) => {
            let off = CMatrix::identity(n, n) - meet.projection();
            Subspace::span(
                &y.columns().iter().map(|c| &off * c).collect::<Vec<_>>(),
                tol,
            )?
            .columns()
        }
    };
    if m > 0 {
        let fresh = complement(&sum(x, y, tol)?)?.canonical_basis();
        cols.extend(fresh.into_iter().take(m));
    }
    let z = Subspace::span(&cols, tol)?;
    let first = geodesic(x, y, tol)?;
    let second = geodesic(y, &z, tol)?;
    let mut nodes = first.nodes;
    nodes.extend(second.nodes.into_iter().skip(1));
    Ok((z, GrassmannPath { nodes }))
}

/// Seeded members of the star of `x`: `x + <r>` for random rays `r ⊥ x`.
pub fn star_members(
    x: &Subspace,
    count: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<Vec<Subspace>> {
    if count < 2 {
        return Err(Error::TooFewSamples { min: 2, got: count });
    }
    let perp = complement(x)?;
    let mut rng = seeded(seed);
    (0..count)
        .map(|_| sum(x, &random_ray_in(&perp, &mut rng).as_subspace(), tol))
        .collect()
}

/// The hyperplane of `y` orthogonal to `y * coeffs`.
fn hyperplane_in(y: &Subspace, coeffs: &CVector, tol: &Tolerance) -> Result<Subspace> {
    let normal = Subspace::span(std::slice::from_ref(coeffs), tol)?;
    let inside = complement(&normal)?;
    Ok(Subspace::from_orthonormal_unchecked(
        y.basis() * inside.basis(),
    ))
}

/// Seeded members of the top of `y`: the hyperplanes of `y` orthogonal to
/// random rays of `y`.
pub fn top_members(
    y: &Subspace,
    count: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<Vec<Subspace>> {
    if y.dim() < 2 {
        return Err(Error::Precondition(
            "a top needs an anchor of dimension at least 2".into(),
        ));
    }
    let mut rng = seeded(seed);
    (0..count)
        .map(|_| hyperplane_in(y, &gaussian_vector(y.dim(), &mut rng), tol))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CliqueKind {
    Star,
    Top,
}

impl CliqueKind {
    /// Dimension `k` of the members given the anchor dimension.
    pub fn member_dim(self, anchor: &Subspace) -> usize {
        match self {
            CliqueKind::Star => anchor.dim() + 1,
            CliqueKind::Top => anchor.dim() - 1,
        }
    }

    /// Size of every maximal compatible subset: `k + 1` for tops, `n - k + 1` for stars.
    pub fn maximal_compatible_size(self, anchor: &Subspace) -> usize {
        let k = self.member_dim(anchor);
        match self {
            CliqueKind::Star => anchor.ambient() - k + 1,
            CliqueKind::Top => k + 1,
        }
    }

    fn check_anchor(self, anchor: &Subspace) -> Result<()> {
        match self {
            CliqueKind::Star if anchor.dim() >= anchor.ambient() => Err(Error::ZeroComplement),
            CliqueKind::Top if anchor.dim() < 2 => Err(Error::Precondition(
                "a top needs an anchor of dimension at least 2".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// A maximal compatible subset of a star or top, built from one orthonormal
/// basis: the coordinate hyperplanes of a top anchor, or the anchor extended
/// by each basis vector of its complement for a star.
pub fn max_compatible_clique(
    kind: CliqueKind,
    anchor: &Subspace,
    tol: &Tolerance,
) -> Result<Vec<Subspace>> {
    kind.check_anchor(anchor)?;
    match kind {
        CliqueKind::Top => {
            let basis = anchor.canonical_basis();
            (0..basis.len())
                .map(|skip| {
                    let cols: Vec<CVector> = basis
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, b)| b.clone())
                        .collect();
                    Subspace::span(&cols, tol)
                })
                .collect()
        }
        CliqueKind::Star => complement(anchor)?
            .canonical_basis()
            .into_iter()
            .map(|b| {
                let mut cols = anchor.columns();
                cols.push(b);
                Subspace::span(&cols, tol)
            })
            .collect(),
    }
}

/// Seeded candidate members of the star or top around `anchor`. The pool
/// opens with the members aligned to the anchor's canonical frame (the ones a
/// non-maximal clique would be missing); after that, candidates alternate
/// between uniformly random members and mixes of two frame directions, which
/// is where near-misses of compatibility live.
pub fn clique_candidates(
    kind: CliqueKind,
    anchor: &Subspace,
    count: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<Vec<Subspace>> {
    kind.check_anchor(anchor)?;
    let mut rng = seeded(seed);
    let frame: Vec<CVector> = match kind {
        CliqueKind::Star => complement(anchor)?.canonical_basis(),
        CliqueKind::Top => anchor.canonical_basis(),
    };
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let direction = if i < frame.len() {
            frame[i].clone()
        } else if i % 2 == 0 || frame.len() < 2 {
            let c = gaussian_vector(frame.len(), &mut rng);
            frame
                .iter()
                .zip(c.iter())
                .map(|(b, a)| b * *a)
                .sum::<CVector>()
        } else {
            let a = rng.random_range(0..frame.len());
            let mut b = rng.random_range(0..frame.len() - 1);
            if b >= a {
                b += 1;
            }
            let c = gaussian_vector(2, &mut rng);
            &frame[a] * c[0] + &frame[b] * c[1]
        };
        let member = match kind {
            CliqueKind::Star => {
                let mut cols = anchor.columns();
                cols.push(direction);
                Subspace::span(&cols, tol)?
            }
            CliqueKind::Top => {
                let coeffs = anchor.basis().adjoint() * direction;
                hyperplane_in(anchor, &coeffs, tol)?
            }
        };
        out.push(member);
    }
    Ok(out)
}

/// Greedily adds every candidate that is new and compatible with all current
/// members; returns the indices of the candidates that were added.
pub fn greedy_extend(
    clique: &[Subspace],
    candidates: &[Subspace],
    tol: &Tolerance,
) -> Result<Vec<usize>> {
    let mut members: Vec<Subspace> = clique.to_vec();
    let mut added = Vec::new();
    for (i, cand) in candidates.iter().enumerate() {
        if members.iter().any(|m| m.approx_eq(cand, tol)) {
            continue;
        }
        let mut ok = true;
        for m in &members {
            if !is_compatible(m, cand, tol)? {
                ok = false;
                break;
            }
        }
        if ok {
            members.push(cand.clone());
            added.push(i);
        }
    }
    Ok(added)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliqueReport {
    pub kind: CliqueKind,
    pub n: usize,
    pub k: usize,
    pub size: usize,
    pub expected: usize,
    pub pairwise_compatible: bool,
    pub candidates_tried: usize,
    pub extensions_found: usize,
    pub pass: bool,
}

/// Builds the maximal compatible clique around `anchor` and tries to enlarge
/// it with `pool` seeded candidates.
pub fn clique_report(
    kind: CliqueKind,
    anchor: &Subspace,
    pool: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<(Vec<Subspace>, CliqueReport)> {
    let clique = max_compatible_clique(kind, anchor, tol)?;
    let mut pairwise_compatible = true;
    for i in 0..clique.len() {
        for j in i + 1..clique.len() {
            pairwise_compatible &= is_compatible(&clique[i], &clique[j], tol)?;
        }
    }
    let candidates = clique_candidates(kind, anchor, pool, seed, tol)?;
    let added = greedy_extend(&clique, &candidates, tol)?;
    let expected = kind.maximal_compatible_size(anchor);
    let report = CliqueReport {
        kind,
        n: anchor.ambient(),
        k: kind.member_dim(anchor),
        size: clique.len(),
        expected,
        pairwise_compatible,
        candidates_tried: candidates.len(),
        extensions_found: added.len(),
        pass: clique.len() == expected && pairwise_compatible && added.is_empty(),
    };
    Ok((clique, report))
}

/// For adjacent `X, Y` with `n > 2k`: `X' = (X ∩ Y) + P`, `Y' = (X ∩ Y) + Q`
/// with `P, Q` orthogonal rays orthogonal to `X + Y`. Both `{X, X', Y'}` and
/// `{Y, X', Y'}` are then pairwise ortho-adjacent.
pub fn bridge(x: &Subspace, y: &Subspace, tol: &Tolerance) -> Result<(Subspace, Subspace)> {
    same_shape(x, y)?;
    let n = x.ambient();
    let k = x.dim();
    if n <= 2 * k {
        return Err(Error::Precondition(format!(
            "bridge needs dim H > 2k, got n = {n}, k = {k}"
        )));
    }
    if !is_adjacent(x, y, tol)? {
        return Err(Error::Precondition(
            "bridge needs adjacent subspaces".into(),
        ));
    }
    let outside = complement(&sum(x, y, tol)?)?.canonical_basis();
    let common: Vec<CVector> = intersect(x, y, tol)?.map_or_else(Vec::new, |m| m.columns());
    let extend = |v: &CVector| {
        let mut cols = common.clone();
        cols.push(v.clone());
        Subspace::span(&cols, tol)
    };
    Ok((extend(&outside[0])?, extend(&outside[1])?))
}

/// Members of `G_j(y)`: a seeded random `j`-subspace of `y`.
pub fn random_subspace_of(y: &Subspace, j: usize, rng: &mut impl Rng) -> Subspace {
    let coeffs = crate::sampling::random_unitary(y.dim(), rng);
    let cols: CMatrix = y.basis() * coeffs.columns(0, j);
    Subspace::from_orthonormal_unchecked(cols)
}

/// Overlap singular values `cos θ_i`, descending; exposed for diagnostics.
pub fn overlap_cosines(x: &Subspace, y: &Subspace) -> Result<Vec<f64>> {
    same_shape(x, y)?;
    Ok(sorted_svd(&(x.basis().adjoint() * y.basis()), false).0)
}
