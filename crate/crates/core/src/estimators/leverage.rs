use crate::decomp::svd;
use crate::error::Result;
use crate::matrix::Matrix;

/// Left leverage scores: the diagonal of the projector onto the column space,
/// i.e. squared row norms of the reduced U factor.
#[derive(Debug, Clone)]
pub struct LeverageScores {
    pub scores: Vec<f64>,
    pub rank: usize,
}

pub fn leverage_scores(m: &Matrix, rank_tol: f64) -> Result<LeverageScores> {
    let f = svd(m, rank_tol)?;
    let r = f.rank();
    let scores = (0..m.rows())
        .map(|i| (0..r).map(|k| f.u.get(i, k).powi(2)).sum())
        .collect();
    Ok(LeverageScores { scores, rank: r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::Permutation;
    use crate::decomp::DEFAULT_RANK_TOL;
    use crate::instance::{gaussian_matrix, stream_rng};

    #[test]
    fn orthonormal_columns_give_unit_scores() {
        let m = Matrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let l = leverage_scores(&m, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(l.rank, 2);
        assert!((l.scores[0] - 1.0).abs() < 1e-12);
        assert!((l.scores[1] - 1.0).abs() < 1e-12);
        assert!(l.scores[2].abs() < 1e-12);
    }

    #[test]
    fn scale_invariant() {
        let m = gaussian_matrix(6, 3, &mut stream_rng(4, 40));
        let a = leverage_scores(&m, DEFAULT_RANK_TOL).unwrap();
        let b = leverage_scores(&m.scale(-3.7), DEFAULT_RANK_TOL).unwrap();
        for (x, y) in a.scores.iter().zip(&b.scores) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn hand_computed_hat_diagonal() {
        // M = [[1,0],[1,1],[0,1]]: hat matrix diagonal is (2/3, 2/3, 2/3).
        let m = Matrix::from_rows(vec![vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let l = leverage_scores(&m, DEFAULT_RANK_TOL).unwrap();
        for &s in &l.scores {
            assert!((s - 2.0 / 3.0).abs() < 1e-12, "score {s}");
        }
    }

    #[test]
    fn sum_equals_rank_and_range() {
        for trial in 0..50u64 {
            let (n, d) = (3 + (trial as usize % 6), 1 + (trial as usize % 4));
            let m = gaussian_matrix(n, d, &mut stream_rng(trial, 41));
            let l = leverage_scores(&m, DEFAULT_RANK_TOL).unwrap();
            let sum: f64 = l.scores.iter().sum();
            assert!((sum - l.rank as f64).abs() <= 1e-8);
            for &s in &l.scores {
                assert!((-1e-10..=1.0 + 1e-10).contains(&s));
            }
        }
    }

    #[test]
    fn permutation_equivariant() {
        for trial in 0..20u64 {
            let m = gaussian_matrix(7, 3, &mut stream_rng(trial, 42));
            let mut map: Vec<usize> = (0..7).collect();
            map.rotate_left((trial as usize % 6) + 1);
            let p = Permutation::new(map).unwrap();
            let direct = leverage_scores(&p.apply(&m).unwrap(), DEFAULT_RANK_TOL).unwrap();
            let expected = p
                .apply_values(&leverage_scores(&m, DEFAULT_RANK_TOL).unwrap().scores)
                .unwrap();
            for (a, b) in direct.scores.iter().zip(&expected) {
                assert!((a - b).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn zero_matrix_rank_zero() {
        let l = leverage_scores(&Matrix::zeros(4, 2), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(l.rank, 0);
        assert!(l.scores.iter().all(|&s| s == 0.0));
    }
}
