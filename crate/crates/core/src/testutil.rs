//! Helpers shared by unit tests.

use crate::decomp::svd;
use crate::instance::{gaussian_matrix, stream_rng};
use crate::matrix::Matrix;

/// Rank-2 matrix with prescribed singular values built from seeded random
/// orthonormal factors.
pub(crate) fn rank_two_signal(n: usize, m: usize, s1: f64, s2: f64, seed: u64) -> Matrix {
    from_spectrum(&[s1, s2], n, m, seed)
}

/// Matrix with the given singular values and seeded random singular vectors.
pub(crate) fn from_spectrum(values: &[f64], n: usize, m: usize, seed: u64) -> Matrix {
    let u = svd(
        &gaussian_matrix(n, values.len(), &mut stream_rng(seed, 101)),
        0.0,
    )
    .unwrap()
    .u;
    let v = svd(
        &gaussian_matrix(m, values.len(), &mut stream_rng(seed, 102)),
        0.0,
    )
    .unwrap()
    .u;
    Matrix::from_fn(n, m, |i, j| {
        values
            .iter()
            .enumerate()
            .map(|(k, &s)| s * u.get(i, k) * v.get(j, k))
            .sum()
    })
}

/// Random orthonormal n x k matrix.
pub(crate) fn random_orthonormal(n: usize, k: usize, seed: u64) -> Matrix {
    svd(&gaussian_matrix(n, k, &mut stream_rng(seed, 103)), 0.0)
        .unwrap()
        .u
}
