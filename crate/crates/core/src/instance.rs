//! Synthetic instance generation for the permuted and clustered observation
//! models.
//!
//! Reproducibility contract: all randomness flows through ChaCha8 streams
//! seeded with SplitMix64-derived sub-seeds, and normal variates come from
//! the ziggurat sampler in `rand_distr` (version pinned in Cargo.toml). The
//! same seed therefore produces bit-identical instances across runs and
//! across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::arrangement::{Arrangement, ClusteringAssignment, Permutation};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Which row-rearrangement class the arrangement is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Permutation,
    Clustering,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Permutation => "permutation",
            ModelKind::Clustering => "clustering",
        })
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "permutation" => Ok(ModelKind::Permutation),
            "clustering" => Ok(ModelKind::Clustering),
            other => Err(Error::InvalidArgument(format!("unknown model '{other}'"))),
        }
    }
}

/// Design matrix source.
#[derive(Debug, Clone)]
pub enum Design {
    Gaussian,
    Given(Matrix),
}

/// A fully realized draw from the observation model: ground truth plus the
/// noisy observation.
#[derive(Debug, Clone)]
pub struct Instance {
    pub a: Matrix,
    pub x_star: Matrix,
    pub arrangement: Arrangement,
    pub sigma: f64,
    pub y_star: Matrix,
    pub y: Matrix,
    pub seed: u64,
}

impl Instance {
    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn m(&self) -> usize {
        self.x_star.cols()
    }

    pub fn d(&self) -> usize {
        self.a.cols()
    }

    /// The realized noise `W = Y - Y*`.
    pub fn noise(&self) -> Matrix {
        self.y
            .sub(&self.y_star)
            .expect("same shape by construction")
    }
}

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Bijective on u64.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a per-trial seed from a master seed and the (cell, trial) indices:
/// three rounds of the SplitMix64 finalizer, xoring one index in between
/// rounds. Parallel and serial sweeps that agree on indices agree on seeds.
pub fn mix_seed(master: u64, cell: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ cell) ^ trial)
}

// Sub-stream tags: each random component of an instance draws from its own
// ChaCha8 stream so that e.g. a given design matrix does not shift the noise.
const STREAM_DESIGN: u64 = 1;
const STREAM_COEFF: u64 = 2;
const STREAM_ARRANGEMENT: u64 = 3;
const STREAM_NOISE: u64 = 4;

pub(crate) fn stream_rng(seed: u64, tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ tag))
}

pub(crate) fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let data = (0..rows * cols)
        .map(|_| StandardNormal.sample(rng))
        .collect();
    Matrix::from_raw(rows, cols, data)
}

pub(crate) fn noise_matrix(rows: usize, cols: usize, sigma: f64, seed: u64) -> Matrix {
    if sigma == 0.0 {
        return Matrix::zeros(rows, cols);
    }
    let mut rng = stream_rng(seed, STREAM_NOISE);
    let data = (0..rows * cols)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            sigma * z
        })
        .collect();
    Matrix::from_raw(rows, cols, data)
}

/// Uniform random permutation map via Fisher-Yates.
fn random_permutation(n: usize, rng: &mut ChaCha8Rng) -> Permutation {
    let mut map: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        map.swap(i, j);
    }
    Permutation::new(map).expect("shuffle of identity is a bijection")
}

fn random_clustering(n: usize, rng: &mut ChaCha8Rng) -> ClusteringAssignment {
    let map = (0..n).map(|_| rng.random_range(0..n)).collect();
    ClusteringAssignment::new(map).expect("entries drawn in range")
}

/// Draws an instance of the observation model. Pure function of its
/// arguments, including the seed.
pub fn generate_instance(
    n: usize,
    m: usize,
    d: usize,
    sigma: f64,
    model: ModelKind,
    design: Design,
    seed: u64,
) -> Result<Instance> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidDimensions(format!(
            "n and m must be positive (got n={n}, m={m})"
        )));
    }
    if sigma < 0.0 || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "sigma must be finite and nonnegative, got {sigma}"
        )));
    }

    let a = match design {
        Design::Gaussian => gaussian_matrix(n, d, &mut stream_rng(seed, STREAM_DESIGN)),
        Design::Given(a) => {
            if a.rows() != n || a.cols() != d {
                return Err(Error::dim(
                    "given design matrix",
                    format!("{n}x{d}"),
                    format!("{}x{}", a.rows(), a.cols()),
                ));
            }
            a
        }
    };

    let x_star = gaussian_matrix(d, m, &mut stream_rng(seed, STREAM_COEFF));

    let mut arr_rng = stream_rng(seed, STREAM_ARRANGEMENT);
    let arrangement = match model {
        ModelKind::Permutation => Arrangement::Permutation(random_permutation(n, &mut arr_rng)),
        ModelKind::Clustering => Arrangement::Clustering(random_clustering(n, &mut arr_rng)),
    };

    let y_star = arrangement.apply(&a.matmul(&x_star)?)?;
    let w = noise_matrix(n, m, sigma, seed);
    let y = y_star.add(&w)?;

    Ok(Instance {
        a,
        x_star,
        arrangement,
        sigma,
        y_star,
        y,
        seed,
    })
}
