use std::time::Instant;

use crate::arrangement::{Arrangement, ClusteringAssignment, Permutation};
use crate::decomp::{projection_residual, pseudo_inverse, svd, DEFAULT_RANK_TOL};
use crate::error::{Error, Result};
use crate::estimators::{DenoiseResult, Diagnostics};
use crate::instance::ModelKind;
use crate::matrix::Matrix;

/// 9! is about 3.6e5 least-squares evaluations.
pub const DEFAULT_PERMUTATION_CAP: usize = 9;
/// 6^6 is about 4.7e4 candidate maps.
pub const DEFAULT_CLUSTERING_CAP: usize = 6;

/// Arrangements whose objective is within this relative tolerance of the
/// minimum count as ties; the lexicographically smallest map wins.
const TIE_REL_TOL: f64 = 1e-12;

/// Exact maximum likelihood denoising by exhaustive search over the
/// arrangement class, with the default instance-size cap.
pub fn mle_denoise(a: &Matrix, y: &Matrix, model: ModelKind) -> Result<DenoiseResult> {
    let cap = match model {
        ModelKind::Permutation => DEFAULT_PERMUTATION_CAP,
        ModelKind::Clustering => DEFAULT_CLUSTERING_CAP,
    };
    mle_denoise_capped(a, y, model, cap)
}

/// Exhaustive MLE with an explicit cap on n.
pub fn mle_denoise_capped(
    a: &Matrix,
    y: &Matrix,
    model: ModelKind,
    cap: usize,
) -> Result<DenoiseResult> {
    if a.rows() != y.rows() {
        return Err(Error::dim("mle rows of A vs Y", a.rows(), y.rows()));
    }
    let n = a.rows();
    if n == 0 {
        return Err(Error::InvalidDimensions(
            "mle needs at least one row".into(),
        ));
    }
    if n > cap {
        return Err(Error::InstanceTooLarge { n, cap });
    }

    let start = Instant::now();
    let search = match model {
        ModelKind::Permutation => search_permutations(a, y)?,
        ModelKind::Clustering => search_clusterings(a, y)?,
    };

    let arrangement = match model {
        ModelKind::Permutation => {
            Arrangement::Permutation(Permutation::new(search.best_map.clone())?)
        }
        ModelKind::Clustering => {
            Arrangement::Clustering(ClusteringAssignment::new(search.best_map.clone())?)
        }
    };
    let arranged_a = arrangement.apply(a)?;
    let x_hat = pseudo_inverse(&arranged_a, DEFAULT_RANK_TOL)?.matmul(y)?;
    let y_hat = arranged_a.matmul(&x_hat)?;
    let objective = y.sub(&y_hat)?.frobenius_norm_sq();

    let mut diagnostics = Diagnostics::new();
    diagnostics.set_int("arrangements_enumerated", search.leaves);
    diagnostics.set_int("nodes_expanded", search.nodes);
    diagnostics.set_int("cap", cap as u64);
    diagnostics.set_float("wall_time_ms", start.elapsed().as_secs_f64() * 1e3);

    Ok(DenoiseResult {
        y_hat,
        arrangement_hat: Some(arrangement),
        x_hat: Some(x_hat),
        objective,
        diagnostics,
    })
}

struct SearchOutcome {
    best_map: Vec<usize>,
    leaves: u64,
    nodes: u64,
}

/// Tracks the minimum objective and the lexicographically smallest map whose
/// objective ties it. Relies on maps being offered in lexicographic order.
struct BestTracker {
    min_obj: f64,
    best: Option<(Vec<usize>, f64)>,
}

impl BestTracker {
    fn new() -> Self {
        Self {
            min_obj: f64::INFINITY,
            best: None,
        }
    }

    fn seeded(min_obj: f64) -> Self {
        Self {
            min_obj,
            best: None,
        }
    }

    fn tie_bound(&self) -> f64 {
        self.min_obj * (1.0 + TIE_REL_TOL)
    }

    fn offer(&mut self, map: &[usize], obj: f64) {
        if obj < self.min_obj {
            self.min_obj = obj;
            let keep_previous = self
                .best
                .as_ref()
                .is_some_and(|(_, prev)| *prev <= self.tie_bound());
            if !keep_previous {
                self.best = Some((map.to_vec(), obj));
            }
        } else if self.best.is_none() && obj <= self.tie_bound() {
            self.best = Some((map.to_vec(), obj));
        }
    }

    fn into_best(self) -> Vec<usize> {
        self.best.expect("at least one arrangement evaluated").0
    }
}

/// For a fixed permutation, `min_X ||Y - P A X||_F^2` equals the residual of
/// projecting the inversely gathered observation onto the column space of A:
/// `||P^T Y - P_A P^T Y||_F^2`. The projector basis is computed once.
fn search_permutations(a: &Matrix, y: &Matrix) -> Result<SearchOutcome> {
    let n = y.rows();
    let m = y.cols();
    let factors = svd(a, DEFAULT_RANK_TOL)?;
    let u = &factors.u;
    let r = u.cols();

    let mut perm: Vec<usize> = (0..n).collect();
    let mut inv = vec![0usize; n];
    let mut gathered = vec![0.0; n * m];
    let mut coeffs = vec![0.0; r * m];
    let mut tracker = BestTracker::new();
    let mut leaves = 0u64;

    loop {
        for (i, &j) in perm.iter().enumerate() {
            inv[j] = i;
        }
        for (dst, &src) in inv.iter().enumerate() {
            gathered[dst * m..(dst + 1) * m].copy_from_slice(y.row(src));
        }
        let obj = basis_residual_buffered(u, &gathered, n, m, &mut coeffs);
        tracker.offer(&perm, obj);
        leaves += 1;
        if !next_permutation(&mut perm) {
            break;
        }
    }

    Ok(SearchOutcome {
        best_map: tracker.into_best(),
        leaves,
        nodes: leaves,
    })
}

fn basis_residual_buffered(u: &Matrix, z: &[f64], n: usize, m: usize, coeffs: &mut [f64]) -> f64 {
    let r = u.cols();
    coeffs.fill(0.0);
    for i in 0..n {
        let zrow = &z[i * m..(i + 1) * m];
        for k in 0..r {
            let uik = u.get(i, k);
            if uik == 0.0 {
                continue;
            }
            let crow = &mut coeffs[k * m..(k + 1) * m];
            for (c, &zv) in crow.iter_mut().zip(zrow) {
                *c += uik * zv;
            }
        }
    }
    let mut resid = 0.0;
    for i in 0..n {
        let zrow = &z[i * m..(i + 1) * m];
        for (j, &zv) in zrow.iter().enumerate() {
            let mut fitted = 0.0;
            for k in 0..r {
                fitted += u.get(i, k) * coeffs[k * m + j];
            }
            let d = zv - fitted;
            resid += d * d;
        }
    }
    resid
}

fn next_permutation(arr: &mut [usize]) -> bool {
    let n = arr.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && arr[i - 1] >= arr[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while arr[j] <= arr[i - 1] {
        j -= 1;
    }
    arr.swap(i - 1, j);
    arr[i..].reverse();
    true
}

/// Depth-first enumeration of all n^n clustering maps in lexicographic order.
/// The partial least-squares residual over the first k rows is monotone in k,
/// so subtrees whose partial residual already exceeds the incumbent (plus a
/// numerical margin) are pruned.
fn search_clusterings(a: &Matrix, y: &Matrix) -> Result<SearchOutcome> {
    let n = y.rows();
    let identity: Vec<usize> = (0..n).collect();
    let seed_obj = stable_objective(a, y, &identity)?;

    let mut search = ClusterSearch {
        a,
        y,
        n,
        d: a.cols(),
        m: y.cols(),
        gram: vec![0.0; a.cols() * a.cols()],
        cross: vec![0.0; a.cols() * y.cols()],
        sum_y_sq: 0.0,
        prefix: Vec::with_capacity(n),
        tracker: BestTracker::seeded(seed_obj),
        leaves: 0,
        nodes: 0,
        error: None,
    };
    search.dfs();
    if let Some(err) = search.error {
        return Err(err);
    }

    Ok(SearchOutcome {
        best_map: search.tracker.into_best(),
        leaves: search.leaves,
        nodes: search.nodes,
    })
}

fn stable_objective(a: &Matrix, y: &Matrix, map: &[usize]) -> Result<f64> {
    let gathered = ClusteringAssignment::new(map.to_vec())?.apply(a)?;
    projection_residual(&gathered, y)
}

struct ClusterSearch<'a> {
    a: &'a Matrix,
    y: &'a Matrix,
    n: usize,
    d: usize,
    m: usize,
    gram: Vec<f64>,
    cross: Vec<f64>,
    sum_y_sq: f64,
    prefix: Vec<usize>,
    tracker: BestTracker,
    leaves: u64,
    nodes: u64,
    error: Option<Error>,
}

impl ClusterSearch<'_> {
    fn dfs(&mut self) {
        if self.error.is_some() {
            return;
        }
        let k = self.prefix.len();
        for j in 0..self.n {
            self.push(j);
            self.nodes += 1;
            let partial = self.partial_residual();
            let margin = 1e-9 * (1.0 + self.tracker.min_obj.min(f64::MAX));
            if k + 1 == self.n {
                self.leaves += 1;
                if partial <= self.tracker.tie_bound() + margin {
                    match stable_objective(self.a, self.y, &self.prefix) {
                        Ok(obj) => self.tracker.offer(&self.prefix, obj),
                        Err(e) => self.error = Some(e),
                    }
                }
            } else if partial <= self.tracker.min_obj + margin {
                self.dfs();
            }
            self.pop(j);
            if self.error.is_some() {
                return;
            }
        }
    }

    fn push(&mut self, j: usize) {
        let k = self.prefix.len();
        let arow = self.a.row(j);
        let yrow = self.y.row(k);
        for (p, &ap) in arow.iter().enumerate() {
            for (q, &aq) in arow.iter().enumerate() {
                self.gram[p * self.d + q] += ap * aq;
            }
            for (c, &yv) in self.cross[p * self.m..(p + 1) * self.m]
                .iter_mut()
                .zip(yrow)
            {
                *c += ap * yv;
            }
        }
        self.sum_y_sq += yrow.iter().map(|v| v * v).sum::<f64>();
        self.prefix.push(j);
    }

    fn pop(&mut self, j: usize) {
        self.prefix.pop();
        let k = self.prefix.len();
        let arow = self.a.row(j);
        let yrow = self.y.row(k);
        for (p, &ap) in arow.iter().enumerate() {
            for (q, &aq) in arow.iter().enumerate() {
                self.gram[p * self.d + q] -= ap * aq;
            }
            for (c, &yv) in self.cross[p * self.m..(p + 1) * self.m]
                .iter_mut()
                .zip(yrow)
            {
                *c -= ap * yv;
            }
        }
        self.sum_y_sq -= yrow.iter().map(|v| v * v).sum::<f64>();
    }

    /// min_X of the prefix fit via the normal equations with a pseudo-inverse
    /// Gram solve: sum ||y_i||^2 - tr(C^T G^+ C).
    fn partial_residual(&mut self) -> f64 {
        if self.d == 0 {
            return self.sum_y_sq.max(0.0);
        }
        let g = Matrix::from_raw(self.d, self.d, self.gram.clone());
        let g_pinv = match pseudo_inverse(&g, DEFAULT_RANK_TOL) {
            Ok(p) => p,
            Err(e) => {
                self.error = Some(e);
                return f64::INFINITY;
            }
        };
        let mut fitted = 0.0;
        for p in 0..self.d {
            for q in 0..self.d {
                let mut s = 0.0;
                let crow_p = &self.cross[p * self.m..(p + 1) * self.m];
                let crow_q = &self.cross[q * self.m..(q + 1) * self.m];
                for (cp, cq) in crow_p.iter().zip(crow_q) {
                    s += cp * cq;
                }
                fitted += g_pinv.get(p, q) * s;
            }
        }
        (self.sum_y_sq - fitted).max(0.0)
    }
}
