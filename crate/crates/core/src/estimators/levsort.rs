use crate::arrangement::{Arrangement, Permutation};
use crate::decomp::{pseudo_inverse, DEFAULT_RANK_TOL};
use crate::error::{Error, Result};
use crate::estimators::{leverage_scores, DenoiseResult, Diagnostics};
use crate::matrix::Matrix;

/// Exact correspondence recovery for the noiseless model by sorting leverage
/// scores, plus a least-squares solve with the matched rows.
///
/// The matching pairs the i-th largest entry of l(Y) with the i-th largest
/// entry of l(A) (the rearrangement-inequality minimizer of
/// `||l(Y) - P l(A)||^2`). On noisy or rank-mismatched inputs the result is
/// still returned, with `preconditions_met = false` in the diagnostics; ties
/// within `tie_tol` additionally set `degenerate_leverage`.
pub fn levsort(a: &Matrix, y: &Matrix, tie_tol: Option<f64>) -> Result<DenoiseResult> {
    if a.rows() != y.rows() {
        return Err(Error::dim("levsort rows of A vs Y", a.rows(), y.rows()));
    }
    let n = a.rows();
    if n == 0 {
        return Err(Error::InvalidDimensions(
            "levsort needs at least one row".into(),
        ));
    }

    let la = leverage_scores(a, DEFAULT_RANK_TOL)?;
    let ly = leverage_scores(y, DEFAULT_RANK_TOL)?;

    let max_score = la
        .scores
        .iter()
        .chain(&ly.scores)
        .fold(0.0f64, |acc, &s| acc.max(s));
    let tie_tol = tie_tol.unwrap_or(1e-9 * max_score);

    let order_a = sorted_desc(&la.scores);
    let order_y = sorted_desc(&ly.scores);
    let gap_a = min_adjacent_gap(&la.scores, &order_a);
    let gap_y = min_adjacent_gap(&ly.scores, &order_y);
    let degenerate = gap_a <= tie_tol || gap_y <= tie_tol;
    let ranks_match = la.rank == ly.rank;

    let mut map = vec![0usize; n];
    for (ai, yi) in order_a.into_iter().zip(order_y) {
        map[yi] = ai;
    }
    let perm = Permutation::new(map)?;

    let arranged_a = perm.apply(a)?;
    let x_hat = pseudo_inverse(&arranged_a, DEFAULT_RANK_TOL)?.matmul(y)?;
    let y_hat = arranged_a.matmul(&x_hat)?;
    let objective = y.sub(&y_hat)?.frobenius_norm_sq();

    let mut diagnostics = Diagnostics::new();
    diagnostics.set_bool("preconditions_met", ranks_match && !degenerate);
    diagnostics.set_bool("degenerate_leverage", degenerate);
    diagnostics.set_int("rank_a", la.rank as u64);
    diagnostics.set_int("rank_y", ly.rank as u64);
    diagnostics.set_float("min_gap_a", gap_a);
    diagnostics.set_float("min_gap_y", gap_y);
    diagnostics.set_float("tie_tol", tie_tol);

    Ok(DenoiseResult {
        y_hat,
        arrangement_hat: Some(Arrangement::Permutation(perm)),
        x_hat: Some(x_hat),
        objective,
        diagnostics,
    })
}

/// Indices sorted by decreasing score; equal scores fall back to index order
/// so the output is deterministic.
fn sorted_desc(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .expect("finite scores")
            .then(a.cmp(&b))
    });
    idx
}

fn min_adjacent_gap(scores: &[f64], order: &[usize]) -> f64 {
    order
        .windows(2)
        .map(|w| scores[w[0]] - scores[w[1]])
        .fold(f64::INFINITY, f64::min)
}
