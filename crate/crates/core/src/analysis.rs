//! Error metrics, theoretical rate curves, the adversarial low-spectrum
//! construction that defeats every SVT threshold, and a sufficient
//! membership check for the non-flatness matrix class.

use crate::arrangement::{Arrangement, Permutation};
use crate::decomp::{svd, DEFAULT_RANK_TOL};
use crate::error::{Error, Result};
use crate::instance::{gaussian_matrix, noise_matrix, stream_rng, Instance};
use crate::matrix::Matrix;

/// Problem-size tuple entering the rate expressions.
#[derive(Debug, Clone, Copy)]
pub struct RateParams {
    pub n: usize,
    pub m: usize,
    pub rank_a: usize,
    pub sigma: f64,
}

impl RateParams {
    pub fn new(n: usize, m: usize, rank_a: usize, sigma: f64) -> Result<Self> {
        if n == 0 || m == 0 || rank_a == 0 {
            return Err(Error::InvalidArgument(
                "rate parameters must be positive".into(),
            ));
        }
        if sigma <= 0.0 || !sigma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "sigma must be positive and finite, got {sigma}"
            )));
        }
        Ok(Self {
            n,
            m,
            rank_a,
            sigma,
        })
    }
}

/// `sigma^2 (rank/n + min(log n, m)/m)`, the exhaustive-search rate shape
/// with unit constant.
pub fn rate_mle(p: &RateParams) -> f64 {
    let n = p.n as f64;
    let m = p.m as f64;
    p.sigma * p.sigma * (p.rank_a as f64 / n + n.ln().min(m) / m)
}

/// `sigma^2 rank (1/n + 1/m)`, the spectral-thresholding rate shape with
/// unit constant.
pub fn rate_svt(p: &RateParams) -> f64 {
    let n = p.n as f64;
    let m = p.m as f64;
    p.sigma * p.sigma * p.rank_a as f64 * (1.0 / n + 1.0 / m)
}

/// `(1/nm) ||Y_hat - Y*||_F^2`.
pub fn normalized_prediction_error(y_hat: &Matrix, y_star: &Matrix) -> Result<f64> {
    if y_hat.rows() != y_star.rows() || y_hat.cols() != y_star.cols() {
        return Err(Error::dim(
            "prediction error shapes",
            format!("{}x{}", y_star.rows(), y_star.cols()),
            format!("{}x{}", y_hat.rows(), y_hat.cols()),
        ));
    }
    let nm = (y_star.rows() * y_star.cols()) as f64;
    Ok(y_hat.sub(y_star)?.frobenius_norm_sq() / nm)
}

/// Builds the instance on which every threshold level incurs a constant-order
/// error: the identity arrangement together with
/// `X0 = V_A diag(1/s_i) L V^T`, so that the signal `Y* = U_A L V^T` has all
/// of its rank(A) singular values equal to `sigma (sqrt n + sqrt m) / 6`.
///
/// `m` is the number of response columns; `V` is a seeded random orthonormal
/// m x rank(A) matrix.
pub fn svt_adversarial_instance(a: &Matrix, m: usize, sigma: f64, seed: u64) -> Result<Instance> {
    if sigma <= 0.0 || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "sigma must be positive and finite, got {sigma}"
        )));
    }
    let n = a.rows();
    let fa = svd(a, DEFAULT_RANK_TOL)?;
    let r = fa.rank();
    if r == 0 {
        return Err(Error::InvalidArgument(
            "design matrix has numerical rank zero".into(),
        ));
    }
    if r > m {
        return Err(Error::RankTooLarge { rank: r, m });
    }

    let level = sigma * ((n as f64).sqrt() + (m as f64).sqrt()) / 6.0;

    // Random orthonormal m x r factor.
    let g = gaussian_matrix(m, r, &mut stream_rng(seed, 21));
    let fg = svd(&g, DEFAULT_RANK_TOL)?;
    if fg.rank() < r {
        return Err(Error::InvalidArgument(
            "random orthonormal factor came out rank-deficient".into(),
        ));
    }
    let v = fg.u;

    // X0 = V_A diag(level / s_i) V^T  (d x m).
    let d = a.cols();
    let x_star = Matrix::from_fn(d, m, |i, j| {
        (0..r)
            .map(|k| fa.v.get(i, k) * (level / fa.singular_values[k]) * v.get(j, k))
            .sum()
    });

    let arrangement = Arrangement::Permutation(Permutation::identity(n));
    let y_star = arrangement.apply(&a.matmul(&x_star)?)?;
    let w = noise_matrix(n, m, sigma, seed);
    let y = y_star.add(&w)?;

    Ok(Instance {
        a: a.clone(),
        x_star,
        arrangement,
        sigma,
        y_star,
        y,
        seed,
    })
}

/// Outcome of the separation-condition check. The check is sufficient, not
/// exhaustive: it never certifies non-membership.
#[derive(Debug, Clone)]
pub enum FlatnessVerdict {
    Member { witness: Vec<f64>, gap: f64 },
    Inconclusive,
}

impl FlatnessVerdict {
    pub fn is_member(&self) -> bool {
        matches!(self, FlatnessVerdict::Member { .. })
    }
}

/// Witness source for [`flatness_witness_check`].
pub enum WitnessMode<'a> {
    /// Check this vector (after projection onto range(A) and normalization).
    Given(&'a [f64]),
    /// Try each normalized column of A plus 32 seeded random range vectors.
    Auto,
}

const AUTO_WITNESS_SEED: u64 = 0x5EED_0F1A;
const AUTO_RANDOM_WITNESSES: usize = 32;

/// Checks whether some unit vector in range(A) has a gap of at least `xi`
/// between its floor(gamma n)-th and next largest entries.
pub fn flatness_witness_check(
    a: &Matrix,
    witness: WitnessMode<'_>,
    gamma: f64,
    xi: f64,
) -> Result<FlatnessVerdict> {
    let n = a.rows();
    let k = (gamma * n as f64).floor() as isize;
    if k < 1 || k > n as isize - 1 {
        return Err(Error::InvalidGamma {
            index: k.max(0) as usize,
            max: n.saturating_sub(1),
        });
    }
    let k = k as usize;

    let fa = svd(a, DEFAULT_RANK_TOL)?;
    let u = &fa.u;

    let evaluate = |vec: &[f64]| -> Option<(Vec<f64>, f64)> {
        if vec.len() != n {
            return None;
        }
        // Project onto range(A) and normalize.
        let r = u.cols();
        let mut coeff = vec![0.0; r];
        for (i, &v) in vec.iter().enumerate() {
            for (kk, c) in coeff.iter_mut().enumerate() {
                *c += u.get(i, kk) * v;
            }
        }
        let mut proj = vec![0.0; n];
        for (i, p) in proj.iter_mut().enumerate() {
            *p = (0..r).map(|kk| u.get(i, kk) * coeff[kk]).sum();
        }
        let norm = proj.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= 1e-14 {
            return None;
        }
        for p in proj.iter_mut() {
            *p /= norm;
        }
        let mut sorted = proj.clone();
        sorted.sort_by(|x, y| y.partial_cmp(x).expect("finite entries"));
        let gap = sorted[k - 1] - sorted[k];
        if gap >= xi {
            Some((proj, gap))
        } else {
            None
        }
    };

    match witness {
        WitnessMode::Given(w) => {
            if w.len() != n {
                return Err(Error::dim("witness length", n, w.len()));
            }
            Ok(match evaluate(w) {
                Some((witness, gap)) => FlatnessVerdict::Member { witness, gap },
                None => FlatnessVerdict::Inconclusive,
            })
        }
        WitnessMode::Auto => {
            for j in 0..a.cols() {
                let col: Vec<f64> = (0..n).map(|i| a.get(i, j)).collect();
                if let Some((witness, gap)) = evaluate(&col) {
                    return Ok(FlatnessVerdict::Member { witness, gap });
                }
            }
            let mut rng = stream_rng(AUTO_WITNESS_SEED, 22);
            for _ in 0..AUTO_RANDOM_WITNESSES {
                let g = gaussian_matrix(a.cols(), 1, &mut rng);
                let vec: Vec<f64> = match a.matmul(&g) {
                    Ok(v) => v.as_slice().to_vec(),
                    Err(_) => break,
                };
                if let Some((witness, gap)) = evaluate(&vec) {
                    return Ok(FlatnessVerdict::Member { witness, gap });
                }
            }
            Ok(FlatnessVerdict::Inconclusive)
        }
    }
}
