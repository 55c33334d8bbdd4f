use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical thresholds shared by every predicate in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Relative singular-value cutoff for numerical rank.
    pub eps_rank: f64,
    /// Absolute threshold for orthogonality and commutator tests.
    pub eps_orth: f64,
    /// Projection-distance threshold for subspace and ray equality.
    pub eps_eq: f64,
    /// Radians separating "zero" from "nonzero" principal angles.
    pub eps_angle: f64,
    /// Maximum ray deviation accepted by reconstruction.
    pub eps_reconstruct: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            eps_rank: 1e-9,
            eps_orth: 1e-9,
            eps_eq: 1e-8,
            eps_angle: 1e-7,
            eps_reconstruct: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("eps_rank", self.eps_rank),
            ("eps_orth", self.eps_orth),
            ("eps_eq", self.eps_eq),
            ("eps_angle", self.eps_angle),
            ("eps_reconstruct", self.eps_reconstruct),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} must be strictly positive, got {value}"
                )));
            }
        }
        if self.eps_rank > 1e-6 {
            return Err(Error::InvalidTolerance(format!(
                "eps_rank must not exceed 1e-6, got {}",
                self.eps_rank
            )));
        }
        Ok(())
    }
}
