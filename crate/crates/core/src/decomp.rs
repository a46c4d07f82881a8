use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Relative singular-value cutoff used when callers do not override it.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Reduced singular value decomposition `M = U diag(s) V^T`.
///
/// `u` is n x r with orthonormal columns, `v` is m x r with orthonormal
/// columns, and singular values are sorted nonincreasing. The numerical rank
/// `r` keeps exactly the singular values strictly above `rank_tol * s_max`.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub u: Matrix,
    pub singular_values: Vec<f64>,
    pub v: Matrix,
    pub rank_tol: f64,
}

impl SvdFactors {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    /// U diag(s) V^T.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.u.rows();
        let m = self.v.rows();
        let r = self.rank();
        Matrix::from_fn(n, m, |i, j| {
            (0..r)
                .map(|k| self.u.get(i, k) * self.singular_values[k] * self.v.get(j, k))
                .sum()
        })
    }
}

/// Reduced SVD truncated at the relative rank tolerance.
pub fn svd(m: &Matrix, rank_tol: f64) -> Result<SvdFactors> {
    let (n, cols) = (m.rows(), m.cols());
    if n == 0 || cols == 0 {
        return Ok(SvdFactors {
            u: Matrix::zeros(n, 0),
            singular_values: Vec::new(),
            v: Matrix::zeros(cols, 0),
            rank_tol,
        });
    }

    let fm = faer::Mat::<f64>::from_fn(n, cols, |i, j| m.get(i, j));
    let svd = fm.thin_svd().map_err(|_| Error::ConvergenceFailure)?;
    let u = svd.U();
    let v = svd.V();
    let sv = svd.S();
    let k = sv.dim();

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| sv[b].partial_cmp(&sv[a]).expect("finite singular values"));

    let s_max = order.first().map_or(0.0, |&i| sv[i]);
    let cutoff = rank_tol * s_max;
    let kept: Vec<usize> = order.into_iter().filter(|&i| sv[i] > cutoff).collect();
    let r = kept.len();

    let mut uk = Matrix::zeros(n, r);
    let mut vk = Matrix::zeros(cols, r);
    let mut singular_values = Vec::with_capacity(r);
    for (col, &kk) in kept.iter().enumerate() {
        singular_values.push(sv[kk]);
        for i in 0..n {
            uk.set(i, col, u[(i, kk)]);
        }
        for j in 0..cols {
            vk.set(j, col, v[(j, kk)]);
        }
    }

    Ok(SvdFactors {
        u: uk,
        singular_values,
        v: vk,
        rank_tol,
    })
}

/// Moore-Penrose pseudoinverse `M^+ = V diag(1/s) U^T` over the retained
/// spectrum.
pub fn pseudo_inverse(m: &Matrix, rank_tol: f64) -> Result<Matrix> {
    let f = svd(m, rank_tol)?;
    let r = f.rank();
    Ok(Matrix::from_fn(m.cols(), m.rows(), |i, j| {
        (0..r)
            .map(|k| f.v.get(i, k) / f.singular_values[k] * f.u.get(j, k))
            .sum()
    }))
}

/// Squared residual of the least-squares fit of `y` in the column space of
/// `a`: `||Y - A A^+ Y||_F^2`.
pub fn projection_residual(a: &Matrix, y: &Matrix) -> Result<f64> {
    if a.rows() != y.rows() {
        return Err(Error::dim("projection_residual rows", a.rows(), y.rows()));
    }
    let f = svd(a, DEFAULT_RANK_TOL)?;
    Ok(residual_from_basis(&f.u, y))
}

/// Same residual given an orthonormal basis of the column space. Computed as
/// `||Y - U (U^T Y)||_F^2` so that exact fits come out near zero instead of
/// suffering catastrophic cancellation.
pub(crate) fn residual_from_basis(u: &Matrix, y: &Matrix) -> f64 {
    let (n, m) = (y.rows(), y.cols());
    let r = u.cols();
    let mut coeffs = vec![0.0; r * m];
    for i in 0..n {
        let yrow = y.row(i);
        for k in 0..r {
            let uik = u.get(i, k);
            if uik == 0.0 {
                continue;
            }
            let crow = &mut coeffs[k * m..(k + 1) * m];
            for (c, &yv) in crow.iter_mut().zip(yrow) {
                *c += uik * yv;
            }
        }
    }
    let mut resid = 0.0;
    for i in 0..n {
        let yrow = y.row(i);
        for j in 0..m {
            let mut fitted = 0.0;
            for k in 0..r {
                fitted += u.get(i, k) * coeffs[k * m + j];
            }
            let d = yrow[j] - fitted;
            resid += d * d;
        }
    }
    resid
}
