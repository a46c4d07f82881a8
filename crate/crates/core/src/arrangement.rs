use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Row rearrangement maps.
///
/// Convention used throughout the crate: output row `i` of `apply(p, M)` is
/// input row `p.map()[i]` of `M`. A `Permutation` is a bijective map; a
/// `ClusteringAssignment` may repeat or drop source rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &idx in &map {
            if idx >= n {
                return Err(Error::OutOfRange { index: idx, len: n });
            }
            if seen[idx] {
                return Err(Error::DuplicateIndex { index: idx });
            }
            seen[idx] = true;
        }
        Ok(Self { map })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            map: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.map.len()];
        for (i, &j) in self.map.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { map: inv }
    }

    pub fn apply(&self, m: &Matrix) -> Result<Matrix> {
        apply_map(&self.map, m)
    }

    /// Applies the row map to a vector of per-row values.
    pub fn apply_values(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.map.len() {
            return Err(Error::dim(
                "apply_values length",
                self.map.len(),
                values.len(),
            ));
        }
        Ok(self.map.iter().map(|&j| values[j]).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusteringAssignment {
    map: Vec<usize>,
}

impl ClusteringAssignment {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        for &idx in &map {
            if idx >= n {
                return Err(Error::OutOfRange { index: idx, len: n });
            }
        }
        Ok(Self { map })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, m: &Matrix) -> Result<Matrix> {
        apply_map(&self.map, m)
    }
}

/// Either kind of row rearrangement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Arrangement {
    Permutation(Permutation),
    Clustering(ClusteringAssignment),
}

impl Arrangement {
    pub fn len(&self) -> usize {
        match self {
            Arrangement::Permutation(p) => p.len(),
            Arrangement::Clustering(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn map(&self) -> &[usize] {
        match self {
            Arrangement::Permutation(p) => p.map(),
            Arrangement::Clustering(c) => c.map(),
        }
    }

    pub fn apply(&self, m: &Matrix) -> Result<Matrix> {
        apply_map(self.map(), m)
    }

    pub fn as_permutation(&self) -> Option<&Permutation> {
        match self {
            Arrangement::Permutation(p) => Some(p),
            Arrangement::Clustering(_) => None,
        }
    }
}

fn apply_map(map: &[usize], m: &Matrix) -> Result<Matrix> {
    if map.len() != m.rows() {
        return Err(Error::dim(
            "arrangement length vs matrix rows",
            map.len(),
            m.rows(),
        ));
    }
    let cols = m.cols();
    let mut data = Vec::with_capacity(map.len() * cols);
    for &src in map {
        data.extend_from_slice(m.row(src));
    }
    Ok(Matrix::from_raw(map.len(), cols, data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_is_noop() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        let p = Permutation::new(vec![0, 1, 2]).unwrap();
        assert_eq!(p.apply(&m).unwrap(), m);
    }

    #[test]
    fn reversal_is_involution() {
        let m = Matrix::from_rows(vec![vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let p = Permutation::new(vec![2, 1, 0]).unwrap();
        let once = p.apply(&m).unwrap();
        assert_eq!(once.row(0), &[3.0]);
        assert_eq!(p.apply(&once).unwrap(), m);
    }

    #[test]
    fn duplicate_index_rejected() {
        let err = Permutation::new(vec![0, 0, 1]).unwrap_err();
        assert!(matches!(err, Error::DuplicateIndex { index: 0 }));
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(matches!(
            Permutation::new(vec![0, 3, 1]).unwrap_err(),
            Error::OutOfRange { index: 3, len: 3 }
        ));
        assert!(ClusteringAssignment::new(vec![0, 5]).is_err());
    }

    #[test]
    fn swap_two_rows() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let p = Permutation::new(vec![1, 0]).unwrap();
        let out = p.apply(&m).unwrap();
        assert_eq!(out.row(0), &[3.0, 4.0]);
        assert_eq!(out.row(1), &[1.0, 2.0]);
    }

    #[test]
    fn clustering_allows_duplication() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let c = ClusteringAssignment::new(vec![0, 0]).unwrap();
        let out = c.apply(&m).unwrap();
        assert_eq!(out.row(0), &[1.0, 2.0]);
        assert_eq!(out.row(1), &[1.0, 2.0]);
    }

    #[test]
    fn length_mismatch_rejected() {
        let m = Matrix::zeros(3, 2);
        let p = Permutation::new(vec![1, 0]).unwrap();
        assert!(p.apply(&m).is_err());
    }

    fn shuffled_map(n: usize, seed: u64) -> Vec<usize> {
        let mut map: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = crate::instance::splitmix64(s);
            map.swap(i, (s % (i as u64 + 1)) as usize);
        }
        map
    }

    proptest! {
        #[test]
        fn inverse_round_trip(n in 1usize..12, cols in 1usize..5, seed in any::<u64>()) {
            let p = Permutation::new(shuffled_map(n, seed)).unwrap();
            let m = Matrix::from_fn(n, cols, |i, j| ((i * 31 + j * 7 + 1) as f64).sin());
            let back = p.inverse().apply(&p.apply(&m).unwrap()).unwrap();
            prop_assert_eq!(back, m);
        }

        #[test]
        fn permutation_preserves_frobenius_norm(n in 1usize..12, cols in 1usize..5, seed in any::<u64>()) {
            let p = Permutation::new(shuffled_map(n, seed)).unwrap();
            let m = Matrix::from_fn(n, cols, |i, j| ((i * 13 + j) as f64).cos());
            let permuted = p.apply(&m).unwrap();
            prop_assert!((permuted.frobenius_norm() - m.frobenius_norm()).abs() < 1e-12);
        }
    }
}
