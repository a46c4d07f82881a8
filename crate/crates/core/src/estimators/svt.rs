use crate::decomp::{svd, DEFAULT_RANK_TOL};
use crate::error::{Error, Result};
use crate::estimators::{DenoiseResult, Diagnostics};
use crate::matrix::Matrix;

/// Hard singular value thresholding: keep every component with `s_i >= lambda`
/// (closed inequality, ties at exactly lambda are kept).
pub fn svt_threshold(m: &Matrix, lambda: f64) -> Result<Matrix> {
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "threshold level must be finite and nonnegative, got {lambda}"
        )));
    }
    let f = svd(m, DEFAULT_RANK_TOL)?;
    let kept: Vec<usize> = (0..f.rank())
        .filter(|&i| f.singular_values[i] >= lambda)
        .collect();
    let mut out = Matrix::zeros(m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let mut v = 0.0;
            for &k in &kept {
                v += f.u.get(i, k) * f.singular_values[k] * f.v.get(j, k);
            }
            out.set(i, j, v);
        }
    }
    Ok(out)
}

/// The theoretically motivated threshold level for noise standard deviation
/// `sigma` on an n x m observation.
pub fn svt_lambda(n: usize, m: usize, sigma: f64) -> f64 {
    1.1 * sigma * ((n as f64).sqrt() + (m as f64).sqrt())
}

/// SVT denoising of the observation at the canonical level
/// `lambda = 1.1 sigma (sqrt(n) + sqrt(m))`.
pub fn svt_denoise(y: &Matrix, sigma: f64) -> Result<DenoiseResult> {
    if sigma <= 0.0 || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "svt requires sigma > 0, got {sigma}"
        )));
    }
    let lambda = svt_lambda(y.rows(), y.cols(), sigma);
    let f = svd(y, DEFAULT_RANK_TOL)?;
    let retained = f.singular_values.iter().filter(|&&s| s >= lambda).count();
    let y_hat = svt_threshold(y, lambda)?;
    let objective = y.sub(&y_hat)?.frobenius_norm_sq();

    let mut diagnostics = Diagnostics::new();
    diagnostics.set_float("lambda", lambda);
    diagnostics.set_int("retained_rank", retained as u64);
    diagnostics.set_float("sigma", sigma);

    Ok(DenoiseResult {
        y_hat,
        arrangement_hat: None,
        x_hat: None,
        objective,
        diagnostics,
    })
}
