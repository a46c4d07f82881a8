use crate::decomp::{svd, DEFAULT_RANK_TOL};
use crate::error::{Error, Result};
use crate::estimators::{DenoiseResult, Diagnostics};
use crate::matrix::Matrix;

/// Pivotal regularization level `2.1 (1/sqrt(n) + 1/sqrt(m))`; needs no
/// knowledge of the noise scale.
pub fn default_srlasso_lambda(n: usize, m: usize) -> f64 {
    2.1 * (1.0 / (n as f64).sqrt() + 1.0 / (m as f64).sqrt())
}

/// Exact global minimizer of `||Y - Y'||_F + lambda ||Y'||_*`.
///
/// The objective is unitarily invariant, so the minimizer shares the singular
/// vectors of Y and has singular values `max(s_i - lambda r, 0)` where the
/// residual radius r solves `r^2 = sum_i min(s_i, lambda r)^2`. With the
/// singular values sorted, each candidate active-set size j gives the closed
/// form `r_j = sqrt(tail_j / (1 - j lambda^2))`; candidates consistent with
/// their region are compared by objective value. The no-shrinkage candidate
/// (r = 0, Y' = Y) is always evaluated.
pub fn sqrt_lasso_denoise(y: &Matrix, lambda: Option<f64>) -> Result<DenoiseResult> {
    let (n, m) = (y.rows(), y.cols());
    let lambda = lambda.unwrap_or_else(|| default_srlasso_lambda(n, m));
    if lambda <= 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "lambda must be positive and finite, got {lambda}"
        )));
    }

    let f = svd(y, DEFAULT_RANK_TOL)?;
    let s = &f.singular_values;
    let k = s.len();

    // Candidate with j active (shrunken but nonzero) components.
    let mut best: Option<Candidate> = None;
    let mut tail = vec![0.0; k + 1];
    for j in (0..k).rev() {
        tail[j] = tail[j + 1] + s[j] * s[j];
    }
    for j in 0..=k {
        let denom = 1.0 - (j as f64) * lambda * lambda;
        if denom <= 0.0 {
            continue;
        }
        let r = (tail[j] / denom).sqrt();
        let t = lambda * r;
        let upper_ok = j == 0 || s[j - 1] >= t;
        let lower_ok = j == k || s[j] <= t;
        if !(upper_ok && lower_ok) {
            continue;
        }
        let shrunk_sum: f64 = s[..j].iter().map(|&si| si - t).sum();
        let objective = r + lambda * shrunk_sum;
        let cand = Candidate {
            active: j,
            radius: r,
            objective,
        };
        if best.as_ref().is_none_or(|b| cand.objective < b.objective) {
            best = Some(cand);
        }
    }
    let best = best.expect("the r = 0 candidate (j = k) is always consistent");

    let t = lambda * best.radius;
    let mut y_hat = Matrix::zeros(n, m);
    for i in 0..n {
        for jj in 0..m {
            let mut v = 0.0;
            for c in 0..best.active {
                v += f.u.get(i, c) * (s[c] - t) * f.v.get(jj, c);
            }
            y_hat.set(i, jj, v);
        }
    }

    let mut diagnostics = Diagnostics::new();
    diagnostics.set_float("lambda", lambda);
    diagnostics.set_float("residual_radius", best.radius);
    diagnostics.set_int("active_set", best.active as u64);

    Ok(DenoiseResult {
        y_hat,
        arrangement_hat: None,
        x_hat: None,
        objective: best.objective,
        diagnostics,
    })
}

struct Candidate {
    active: usize,
    radius: f64,
    objective: f64,
}

/// Objective value `||Y - Y'||_F + lambda ||Y'||_*` evaluated directly at any
/// candidate, for optimality certificates.
pub fn srlasso_objective(y: &Matrix, y_prime: &Matrix, lambda: f64) -> Result<f64> {
    let resid = y.sub(y_prime)?.frobenius_norm();
    let nuc: f64 = svd(y_prime, 0.0)?.singular_values.iter().sum();
    Ok(resid + lambda * nuc)
}
