//! Independent reference computations shared by the integration tests. None
//! of these go through the library's SVD-based routines.

#![allow(dead_code)]

use num_complex::Complex64;
use wignerkit::hilbert::{CMatrix, Ray, Subspace};
use wignerkit::isometry::Isometry;
use wignerkit::projective::RayMapTable;
use wignerkit::reconstruct::anchor_rays;
use wignerkit::sampling::{random_ray, SeededRng};
use wignerkit::tolerance::Tolerance;

/// Rank by Gaussian elimination with full pivoting; pivots below
/// `rel * (largest entry)` count as zero.
pub fn rank_by_elimination(m: &CMatrix, rel: f64) -> usize {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let mut rank = 0;
    for step in 0..rows.min(cols) {
        let mut best = (step, step, 0.0);
        for i in step..rows {
            for j in step..cols {
                let v = a[(i, j)].norm();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        if best.2 <= rel * scale {
            break;
        }
        a.swap_rows(step, best.0);
        a.swap_columns(step, best.1);
        let pivot = a[(step, step)];
        for i in step + 1..rows {
            let factor = a[(i, step)] / pivot;
            for j in step..cols {
                let sub = factor * a[(step, j)];
                a[(i, j)] -= sub;
            }
        }
        rank += 1;
    }
    rank
}

/// Squared cosines of the principal angles as eigenvalues of the Hermitian
/// matrix `B_X^* P_Y B_X`, descending.
pub fn squared_cosines(x: &Subspace, y: &Subspace) -> Vec<f64> {
    let m = x.basis().adjoint() * y.projection() * x.basis();
    let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Anchor rays plus `extra` random rays, mapped through `iso`.
pub fn induced_table(
    iso: &Isometry,
    extra: usize,
    rng: &mut SeededRng,
    tol: &Tolerance,
) -> RayMapTable {
    let n = iso.dim();
    let mut sources = anchor_rays(n);
    sources.extend((0..extra).map(|_| random_ray(n, rng)));
    RayMapTable::induced_by(iso, sources.iter(), tol).unwrap()
}

/// Ray `[cos(t) r + sin(t) s]` for unit `s ⊥ r`: ray distance `sqrt(2) sin(t)`.
pub fn tilt(r: &Ray, s: &Ray, t: f64) -> Ray {
    Ray::new(r.vector() * Complex64::new(t.cos(), 0.0) + s.vector() * Complex64::new(t.sin(), 0.0))
        .unwrap()
}
