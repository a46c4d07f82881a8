//! Shared helpers for the criterion benchmarks.

use permlm::{generate_instance, Design, Instance, ModelKind};

/// Standard benchmark instance: Gaussian design, permutation model.
pub fn bench_instance(n: usize, m: usize, d: usize, sigma: f64, seed: u64) -> Instance {
    generate_instance(
        n,
        m,
        d,
        sigma,
        ModelKind::Permutation,
        Design::Gaussian,
        seed,
    )
    .expect("valid benchmark dimensions")
}
