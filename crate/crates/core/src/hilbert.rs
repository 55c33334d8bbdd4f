//! Complex linear algebra on `C^n`: rays, orthonormal subspace bases and the
//! lattice operations (sum, intersection, orthocomplement) built on them.
//!
//! Every [`Subspace`] is stored as an `n x k` matrix with orthonormal columns.
//! Numerical rank counts singular values above `eps_rank * sigma_max`, so the
//! rank decisions are invariant under rescaling of the input.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::Tolerance;

pub type CVector = DVector<Complex64>;
pub type CMatrix = DMatrix<Complex64>;

/// Entries below this modulus are skipped when fixing the phase of a ray.
pub const PHASE_CUTOFF: f64 = 1e-12;

/// Hermitian product `sum_j x_j * conj(y_j)`: linear in `x`, conjugate-linear in `y`.
pub fn inner(x: &CVector, y: &CVector) -> Result<Complex64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok(x.iter().zip(y.iter()).map(|(a, b)| a * b.conj()).sum())
}

pub(crate) fn inner_unchecked(x: &CVector, y: &CVector) -> Complex64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b.conj()).sum()
}

pub fn is_finite_matrix(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Thin SVD `m = U diag(sigma) V^*`, singular values descending.
pub(crate) struct Svd {
    pub sigma: Vec<f64>,
    pub u: CMatrix,
    pub v: CMatrix,
}

pub(crate) fn svd(m: &CMatrix) -> Svd {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Svd {
            sigma: Vec::new(),
            u: CMatrix::zeros(rows, 0),
            v: CMatrix::zeros(cols, 0),
        };
    }
    let a = faer::Mat::<Complex64>::from_fn(rows, cols, |i, j| m[(i, j)]);
    let d = a
        .thin_svd()
        .expect("SVD iteration converges on finite input");
    let (s, u, v) = (d.S(), d.U(), d.V());
    let r = rows.min(cols);
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| s[b].re.total_cmp(&s[a].re));
    Svd {
        sigma: order.iter().map(|&i| s[i].re).collect(),
        u: CMatrix::from_fn(rows, r, |i, j| u[(i, order[j])]),
        v: CMatrix::from_fn(cols, r, |i, j| v[(i, order[j])]),
    }
}

/// Singular values (descending) and, optionally, the matching left singular vectors.
pub(crate) fn sorted_svd(m: &CMatrix, with_u: bool) -> (Vec<f64>, Option<CMatrix>) {
    let d = svd(m);
    (d.sigma, with_u.then_some(d.u))
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    sorted_svd(m, false).0
}

fn rank_of_sigma(sigma: &[f64], eps_rank: f64) -> usize {
    match sigma.first() {
        Some(&max) if max > 0.0 => sigma.iter().filter(|&&s| s > eps_rank * max).count(),
        _ => 0,
    }
}

/// Number of singular values above `eps_rank * sigma_max`.
pub fn numerical_rank(m: &CMatrix, tol: &Tolerance) -> usize {
    rank_of_sigma(&singular_values(m), tol.eps_rank)
}

fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Multiplies `v` by the unit scalar that makes its first significant entry real positive.
pub(crate) fn canonical_phase(mut v: CVector) -> CVector {
    if let Some(z) = v.iter().find(|z| z.norm() > PHASE_CUTOFF).copied() {
        let phase = z.conj() / z.norm();
        v *= phase;
    }
    v
}

/// Modified Gram-Schmidt with a second orthogonalization pass per column.
/// Columns must be linearly independent.
pub(crate) fn gram_schmidt(m: &CMatrix) -> CMatrix {
    let mut q = m.clone();
    for j in 0..q.ncols() {
        let mut v = q.column(j).into_owned();
        for _pass in 0..2 {
            for i in 0..j {
                let qi = q.column(i).into_owned();
                let c = inner_unchecked(&v, &qi);
                v -= qi * c;
            }
        }
        let norm = v.norm();
        debug_assert!(norm > 0.0, "gram_schmidt on dependent columns");
        q.set_column(j, &(v / Complex64::new(norm, 0.0)));
    }
    q
}

/// A 1-dimensional subspace of `C^n`, stored as a unit vector whose first
/// significant entry is real and positive.
#[derive(Clone, Debug, PartialEq)]
pub struct Ray {
    vector: CVector,
}

impl Ray {
    pub fn new(v: CVector) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::EmptySpan);
        }
        if !v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = v.norm();
        if norm <= PHASE_CUTOFF {
            return Err(Error::EmptySpan);
        }
        Ok(Self {
            vector: canonical_phase(v / Complex64::new(norm, 0.0)),
        })
    }

    pub fn from_slice(entries: &[Complex64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(entries))
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(CVector::from_iterator(
            entries.len(),
            entries.iter().map(|&x| Complex64::new(x, 0.0)),
        ))
    }

    /// The coordinate ray `[e_j]` in `C^n` (zero-based `j`).
    pub fn basis(n: usize, j: usize) -> Self {
        let mut v = CVector::zeros(n);
        v[j] = Complex64::new(1.0, 0.0);
        Self { vector: v }
    }

    pub fn vector(&self) -> &CVector {
        &self.vector
    }

    pub fn ambient(&self) -> usize {
        self.vector.len()
    }

    pub fn projection(&self) -> CMatrix {
        &self.vector * self.vector.adjoint()
    }

    pub fn as_subspace(&self) -> Subspace {
        Subspace {
            basis: CMatrix::from_columns(std::slice::from_ref(&self.vector)),
        }
    }

    /// `|| P_self - P_other ||_F`, evaluated as `sqrt(2) * sin(angle)` through the
    /// orthogonal residual so that nearly equal rays do not lose precision.
    pub fn distance(&self, other: &Ray) -> f64 {
        let c = inner_unchecked(&other.vector, &self.vector);
        let residual = &other.vector - &self.vector * c;
        std::f64::consts::SQRT_2 * residual.norm().min(1.0)
    }

    pub fn approx_eq(&self, other: &Ray, tol: &Tolerance) -> bool {
        self.distance(other) < tol.eps_eq
    }
}

/// A `k`-dimensional subspace of `C^n` with an orthonormal basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    basis: CMatrix,
}

impl Subspace {
    /// Span of the columns of `m`; the dimension is the numerical rank of `m`.
    pub fn from_columns(m: &CMatrix, tol: &Tolerance) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::EmptySpan);
        }
        if !is_finite_matrix(m) {
            return Err(Error::NonFinite);
        }
        let (sigma, u) = sorted_svd(m, true);
        let rank = rank_of_sigma(&sigma, tol.eps_rank);
        if rank == 0 {
            return Err(Error::EmptySpan);
        }
        let u = u.expect("left singular vectors requested");
        Ok(Self {
            basis: u.columns(0, rank).into_owned(),
        })
    }

    pub fn span(vectors: &[CVector], tol: &Tolerance) -> Result<Self> {
        orthonormalize(vectors, tol)
    }

    /// Trusts that `basis` already has orthonormal columns.
    pub(crate) fn from_orthonormal_unchecked(basis: CMatrix) -> Self {
        Self { basis }
    }

    /// `span{e_j : j in indices}` (zero-based).
    pub fn coordinate(n: usize, indices: &[usize]) -> Self {
        let cols: Vec<CVector> = indices.iter().map(|&j| Ray::basis(n, j).vector).collect();
        Self {
            basis: CMatrix::from_columns(&cols),
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            basis: CMatrix::identity(n, n),
        }
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn column(&self, j: usize) -> CVector {
        self.basis.column(j).into_owned()
    }

    pub fn columns(&self) -> Vec<CVector> {
        (0..self.dim()).map(|j| self.column(j)).collect()
    }

    pub fn ambient(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn projection(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    /// `|| P_self - P_other ||_F`; infinite when the ambient dimensions differ.
    pub fn distance(&self, other: &Subspace) -> f64 {
        if self.ambient() != other.ambient() {
            return f64::INFINITY;
        }
        frobenius(&(self.projection() - other.projection()))
    }

    pub fn approx_eq(&self, other: &Subspace, tol: &Tolerance) -> bool {
        self.dim() == other.dim() && self.distance(other) < tol.eps_eq
    }

    /// `|| (I - P_self) B_inner ||_F`: zero iff `inner` lies inside `self`.
    pub fn containment_deviation(&self, inner: &Subspace) -> f64 {
        let b = &inner.basis;
        frobenius(&(b - &self.basis * (self.basis.adjoint() * b)))
    }

    pub fn contains(&self, inner: &Subspace, tol: &Tolerance) -> bool {
        self.containment_deviation(inner) < tol.eps_eq
    }

    /// Distance of a unit-normalized `v` from the subspace.
    pub fn vector_deviation(&self, v: &CVector) -> f64 {
        let norm = v.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let u = v / Complex64::new(norm, 0.0);
        (&u - &self.basis * (self.basis.adjoint() * &u)).norm()
    }

    pub fn contains_vector(&self, v: &CVector, tol: &Tolerance) -> bool {
        self.vector_deviation(v) < tol.eps_orth.max(tol.eps_eq)
    }

    /// A basis-independent orthonormal basis: pivoted Gram-Schmidt on the
    /// columns of the projection, preferring lower coordinate indices on ties,
    /// each vector phase-canonicalized. Coordinate subspaces get their `e_j`.
    pub fn canonical_basis(&self) -> Vec<CVector> {
        let n = self.ambient();
        let mut residual = self.projection();
        let mut out: Vec<CVector> = Vec::with_capacity(self.dim());
        for _ in 0..self.dim() {
            let mut best = 0;
            let mut best_norm = -1.0;
            for j in 0..n {
                let nrm = residual.column(j).norm();
                if nrm > best_norm + 1e-12 {
                    best = j;
                    best_norm = nrm;
                }
            }
            let mut v = residual.column(best).into_owned();
            for _pass in 0..2 {
                for q in &out {
                    let c = inner_unchecked(&v, q);
                    v -= q * c;
                }
            }
            let v = canonical_phase(&v / Complex64::new(v.norm(), 0.0));
            residual -= &v * (v.adjoint() * &residual);
            out.push(v);
        }
        out
    }

    /// The subspace re-expressed in its canonical basis.
    pub fn canonicalized(&self) -> Subspace {
        Self {
            basis: CMatrix::from_columns(&self.canonical_basis()),
        }
    }
}

/// Orthonormal basis of the span of `vectors`, with `k` equal to the numerical rank.
pub fn orthonormalize(vectors: &[CVector], tol: &Tolerance) -> Result<Subspace> {
    let first = vectors.first().ok_or(Error::EmptySpan)?;
    let n = first.len();
    if let Some(bad) = vectors.iter().find(|v| v.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.len(),
        });
    }
    Subspace::from_columns(&CMatrix::from_columns(vectors), tol)
}

/// Orthogonal complement `S^perp`, of dimension `n - k`.
pub fn complement(s: &Subspace) -> Result<Subspace> {
    let n = s.ambient();
    let k = s.dim();
    if k >= n {
        return Err(Error::ZeroComplement);
    }
    let residual = CMatrix::identity(n, n) - s.projection();
    let (_, u) = sorted_svd(&residual, true);
    let u = u.expect("left singular vectors requested");
    Ok(Subspace {
        basis: u.columns(0, n - k).into_owned(),
    })
}

fn check_ambient(s: &Subspace, t: &Subspace) -> Result<()> {
    if s.ambient() != t.ambient() {
        return Err(Error::DimensionMismatch {
            expected: s.ambient(),
            found: t.ambient(),
        });
    }
    Ok(())
}

/// `S + T`, orthonormalized from the concatenated bases.
pub fn sum(s: &Subspace, t: &Subspace, tol: &Tolerance) -> Result<Subspace> {
    check_ambient(s, t)?;
    let mut cols = s.columns();
    cols.extend(t.columns());
    orthonormalize(&cols, tol)
}

/// `S ∩ T = (S^perp + T^perp)^perp`; `None` for the zero subspace.
pub fn intersect(s: &Subspace, t: &Subspace, tol: &Tolerance) -> Result<Option<Subspace>> {
    check_ambient(s, t)?;
    let n = s.ambient();
    if s.dim() == n {
        return Ok(Some(t.clone()));
    }
    if t.dim() == n {
        return Ok(Some(s.clone()));
    }
    let joined = sum(&complement(s)?, &complement(t)?, tol)?;
    if joined.dim() == n {
        return Ok(None);
    }
    complement(&joined).map(Some)
}

/// Orthogonal projection `B B^*` onto `S`.
pub fn projection_of(s: &Subspace) -> CMatrix {
    s.projection()
}

pub fn intersection_dim(s: &Subspace, t: &Subspace, tol: &Tolerance) -> Result<usize> {
    Ok(intersect(s, t, tol)?.map_or(0, |x| x.dim()))
}
