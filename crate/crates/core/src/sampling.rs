//! Seeded random generation of vectors, rays, subspaces and unitaries.
//!
//! All randomness in the crate flows through [`SeededRng`], so every sampled
//! fixture is reproducible from a single `u64`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::hilbert::{complement, gram_schmidt, CMatrix, CVector, Ray, Subspace};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer; derives independent stream seeds from a base seed.
pub fn derive_seed(base: u64, tag: u64) -> u64 {
    let mut z = base ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Standard complex Gaussian vector; its direction is uniform on the sphere.
pub fn gaussian_vector(n: usize, rng: &mut impl Rng) -> CVector {
    CVector::from_fn(n, |_, _| gaussian(rng))
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_ray(n: usize, rng: &mut impl Rng) -> Ray {
    loop {
        if let Ok(r) = Ray::new(gaussian_vector(n, rng)) {
            return r;
        }
    }
}

/// Haar-distributed unitary: Gram-Schmidt applied to a Ginibre matrix.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> CMatrix {
    gram_schmidt(&gaussian_matrix(n, n, rng))
}

pub fn random_subspace(n: usize, k: usize, rng: &mut impl Rng) -> Subspace {
    let u = random_unitary(n, rng);
    Subspace::from_orthonormal_unchecked(u.columns(0, k).into_owned())
}

pub fn random_ray_in(s: &Subspace, rng: &mut impl Rng) -> Ray {
    loop {
        let coeffs = gaussian_vector(s.dim(), rng);
        if let Ok(r) = Ray::new(s.basis() * coeffs) {
            return r;
        }
    }
}

pub fn random_ray_orthogonal_to(s: &Subspace, rng: &mut impl Rng) -> Result<Ray> {
    Ok(random_ray_in(&complement(s)?, rng))
}

/// Random `k`-subspaces `X, Y` of `C^n` with `dim(X ∩ Y) = j` (generically).
pub fn pair_with_intersection(
    n: usize,
    k: usize,
    j: usize,
    rng: &mut impl Rng,
) -> Result<(Subspace, Subspace)> {
    if j > k || k > n || 2 * k - j > n {
        return Err(Error::Precondition(format!(
            "no pair of {k}-subspaces of C^{n} meets in dimension {j}"
        )));
    }
    let u = random_unitary(n, rng);
    let x = Subspace::from_orthonormal_unchecked(u.columns(0, k).into_owned());
    // Y = span(u_0..u_j) + (k - j) generic directions inside span(u_j..u_n).
    let tail = u.columns(j, n - j).into_owned();
    let mixed = gram_schmidt(&(tail * gaussian_matrix(n - j, k - j, rng)));
    let mut cols: Vec<CVector> = (0..j).map(|i| u.column(i).into_owned()).collect();
    cols.extend((0..k - j).map(|i| mixed.column(i).into_owned()));
    let y = Subspace::from_orthonormal_unchecked(gram_schmidt(&CMatrix::from_columns(&cols)));
    Ok((x, y))
}

/// Random mutually orthogonal `k`-subspaces of `C^n`.
pub fn orthogonal_pair(n: usize, k: usize, rng: &mut impl Rng) -> Result<(Subspace, Subspace)> {
    if 2 * k > n {
        return Err(Error::Precondition(format!(
            "C^{n} holds no pair of orthogonal {k}-subspaces"
        )));
    }
    let u = random_unitary(n, rng);
    let x = Subspace::from_orthonormal_unchecked(u.columns(0, k).into_owned());
    // Randomize Y inside the complement of X so it is not a coordinate block of u.
    let rest = u.columns(k, n - k).into_owned();
    let rot = random_unitary(n - k, rng);
    let y = Subspace::from_orthonormal_unchecked((rest * rot).columns(0, k).into_owned());
    Ok((x, y))
}

pub fn random_permutation(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}
