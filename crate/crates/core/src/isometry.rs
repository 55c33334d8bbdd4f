//! Linear and conjugate-linear isometries of `C^n` and the maps they induce on
//! rays and subspaces.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{CMatrix, CVector, Ray, Subspace};
use crate::sampling::random_unitary;
use crate::tolerance::Tolerance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorClass {
    Linear,
    ConjugateLinear,
}

impl fmt::Display for OperatorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorClass::Linear => f.write_str("linear"),
            OperatorClass::ConjugateLinear => f.write_str("conjugate-linear"),
        }
    }
}

/// `v -> U v` (linear) or `v -> U conj(v)` (conjugate-linear) with `U` unitary.
#[derive(Clone, Debug)]
pub struct Isometry {
    matrix: CMatrix,
    class: OperatorClass,
}

impl Isometry {
    pub fn new(matrix: CMatrix, class: OperatorClass, tol: &Tolerance) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.ncols(),
            });
        }
        let defect = (matrix.adjoint() * &matrix - CMatrix::identity(n, n)).norm();
        let bound = tol.eps_orth * (n as f64).max(1.0) * 10.0;
        if defect.is_nan() || defect >= bound {
            return Err(Error::Precondition(format!(
                "matrix is not unitary (||U*U - I||_F = {defect:.3e})"
            )));
        }
        Ok(Self { matrix, class })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: CMatrix::identity(n, n),
            class: OperatorClass::Linear,
        }
    }

    /// Entrywise complex conjugation.
    pub fn conjugation(n: usize) -> Self {
        Self {
            matrix: CMatrix::identity(n, n),
            class: OperatorClass::ConjugateLinear,
        }
    }

    pub fn random(n: usize, class: OperatorClass, rng: &mut impl Rng) -> Self {
        Self {
            matrix: random_unitary(n, rng),
            class,
        }
    }

    /// Conjugation followed by the permutation `e_j -> e_{perm[j]}`.
    pub fn permutation(perm: &[usize], class: OperatorClass) -> Self {
        let n = perm.len();
        let mut m = CMatrix::zeros(n, n);
        for (j, &i) in perm.iter().enumerate() {
            m[(i, j)] = Complex64::new(1.0, 0.0);
        }
        Self { matrix: m, class }
    }

    pub(crate) fn from_parts_unchecked(matrix: CMatrix, class: OperatorClass) -> Self {
        Self { matrix, class }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn class(&self) -> OperatorClass {
        self.class
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        match self.class {
            OperatorClass::Linear => &self.matrix * v,
            OperatorClass::ConjugateLinear => &self.matrix * v.map(|z| z.conj()),
        }
    }

    pub fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
        match self.class {
            OperatorClass::Linear => &self.matrix * m,
            OperatorClass::ConjugateLinear => &self.matrix * m.map(|z| z.conj()),
        }
    }

    pub fn apply_ray(&self, r: &Ray) -> Ray {
        Ray::new(self.apply(r.vector())).expect("isometry maps unit vectors to unit vectors")
    }

    pub fn apply_subspace(&self, s: &Subspace) -> Subspace {
        Subspace::from_orthonormal_unchecked(self.apply_matrix(s.basis()))
    }

    /// `L2 ∘ L1`: apply `self` first, then `after`.
    pub fn then(&self, after: &Isometry) -> Isometry {
        let matrix = match after.class {
            OperatorClass::Linear => &after.matrix * &self.matrix,
            OperatorClass::ConjugateLinear => &after.matrix * self.matrix.map(|z| z.conj()),
        };
        let class = if self.class == after.class {
            OperatorClass::Linear
        } else {
            OperatorClass::ConjugateLinear
        };
        Isometry { matrix, class }
    }
}
