//! Coordinate-format sparse matrices.
//!
//! Entries are kept sorted row-major with no duplicate positions and no
//! stored zeros, so equality of two matrices is equality of their entry lists.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, f64)>,
}

/// Largest absolute entry and where it occurs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MaxEntry {
    pub value: f64,
    pub row: usize,
    pub col: usize,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_triplets(n, n, values.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    /// Sums duplicate positions and drops exact zeros.
    ///
    /// # Panics
    /// If an index is out of bounds.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Self {
        let mut entries: Vec<_> = triplets.into_iter().collect();
        for &(r, c, _) in &entries {
            assert!(r < rows && c < cols, "entry ({r},{c}) outside {rows}x{cols}");
        }
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|e| e.2 != 0.0);
        SparseMatrix { rows, cols, entries: merged }
    }

    pub fn from_dense(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self::from_triplets(
            rows,
            cols,
            data.iter().enumerate().map(|(i, &v)| (i / cols, i % cols, v)),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries
            .binary_search_by(|e| (e.0, e.1).cmp(&(row, col)))
            .map_or(0.0, |i| self.entries[i].2)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.rows * self.cols];
        for &(r, c, v) in &self.entries {
            out[r * self.cols + c] = v;
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.cols, self.rows, self.entries.iter().map(|&(r, c, v)| (c, r, v)))
    }

    pub fn scale(&self, a: f64) -> Self {
        Self::from_triplets(self.rows, self.cols, self.entries.iter().map(|&(r, c, v)| (r, c, a * v)))
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        Ok(())
    }

    /// `a * self + b * other`.
    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.check_same_shape(other)?;
        let iter = self
            .entries
            .iter()
            .map(|&(r, c, v)| (r, c, a * v))
            .chain(other.entries.iter().map(|&(r, c, v)| (r, c, b * v)));
        Ok(Self::from_triplets(self.rows, self.cols, iter))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.lin_comb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.lin_comb(1.0, other, -1.0)
    }

    fn row_starts(&self) -> Vec<usize> {
        let mut starts = vec![0; self.rows + 1];
        for &(r, _, _) in &self.entries {
            starts[r + 1] += 1;
        }
        for i in 0..self.rows {
            starts[i + 1] += starts[i];
        }
        starts
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let starts = other.row_starts();
        let mut out = Vec::new();
        for &(r, k, v) in &self.entries {
            for &(_, c, w) in &other.entries[starts[k]..starts[k + 1]] {
                out.push((r, c, v * w));
            }
        }
        Ok(Self::from_triplets(self.rows, other.cols, out))
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn max_abs(&self) -> MaxEntry {
        self.entries.iter().fold(MaxEntry::default(), |best, &(r, c, v)| {
            if libm::fabs(v) > best.value {
                MaxEntry { value: libm::fabs(v), row: r, col: c }
            } else {
                best
            }
        })
    }

    /// Stored diagonal as a dense vector.
    pub fn diag(&self) -> Vec<f64> {
        let n = self.rows.min(self.cols);
        let mut d = vec![0.0; n];
        for &(r, c, v) in &self.entries {
            if r == c {
                d[r] = v;
            }
        }
        d
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries.iter().all(|&(r, c, _)| r == c)
    }

    pub fn trace(&self) -> f64 {
        self.diag().iter().sum()
    }

    /// Same matrix with one entry replaced (removed when `value == 0`).
    pub fn with_entry(&self, row: usize, col: usize, value: f64) -> Self {
        let iter = self
            .entries
            .iter()
            .copied()
            .filter(|&(r, c, _)| (r, c) != (row, col))
            .chain(core::iter::once((row, col, value)));
        Self::from_triplets(self.rows, self.cols, iter)
    }

    /// Sub-block with the given row and column index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> crate::linalg::Dense {
        let mut out = crate::linalg::Dense::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out[(i, j)] = self.get(r, c);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn duplicates_merge_and_zeros_drop() {
        let m = SparseMatrix::from_triplets(2, 2, [(0, 1, 1.0), (0, 1, 2.0), (1, 0, 0.0), (1, 1, 1.0), (1, 1, -1.0)]);
        assert_eq!(m.entries(), &[(0, 1, 3.0)]);
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(1, 1), 0.0);
    }

    #[test]
    fn product_and_commutator() {
        // sl2 spin-1/2: [e, f] = h
        let e = SparseMatrix::from_triplets(2, 2, [(0, 1, 1.0)]);
        let f = e.transpose();
        let h = SparseMatrix::diagonal(&[1.0, -1.0]);
        assert_eq!(e.commutator(&f).unwrap(), h);
        assert!(e.mul(&SparseMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn max_location() {
        let m = SparseMatrix::from_triplets(3, 3, [(2, 1, -5.0), (0, 0, 4.0)]);
        let mx = m.max_abs();
        assert_eq!((mx.value, mx.row, mx.col), (5.0, 2, 1));
        assert_eq!(SparseMatrix::zeros(2, 2).max_abs().value, 0.0);
    }

    fn dense(n: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(prop_oneof![Just(0.0), -3.0f64..3.0], n * n)
    }

    proptest! {
        #[test]
        fn mul_matches_dense(a in dense(4), b in dense(4)) {
            let sa = SparseMatrix::from_dense(4, 4, &a);
            let sb = SparseMatrix::from_dense(4, 4, &b);
            let prod = sa.mul(&sb).unwrap().to_dense();
            for i in 0..4 {
                for j in 0..4 {
                    let want: f64 = (0..4).map(|k| a[i * 4 + k] * b[k * 4 + j]).sum();
                    prop_assert!((prod[i * 4 + j] - want).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn transpose_is_involutive(a in dense(5)) {
            let m = SparseMatrix::from_dense(5, 5, &a);
            prop_assert_eq!(m.transpose().transpose(), m.clone());
            prop_assert_eq!(SparseMatrix::from_dense(5, 5, &m.to_dense()), m);
        }
    }
}
