//! Compressed sparse row storage with a fixed pattern.

use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Zero matrix with the given per-row column sets.
    pub fn from_pattern(rows: &[BTreeSet<usize>]) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for r in rows {
            col_idx.extend(r.iter().copied());
            row_ptr.push(col_idx.len());
        }
        let nnz = col_idx.len();
        Self {
            n,
            row_ptr,
            col_idx,
            values: vec![0.0; nnz],
        }
    }

    pub fn identity(n: usize) -> Self {
        let rows: Vec<BTreeSet<usize>> = (0..n).map(|i| BTreeSet::from([i])).collect();
        let mut m = Self::from_pattern(&rows);
        m.values.fill(1.0);
        m
    }

    /// Same pattern, all values zero.
    pub fn zeros_like(&self) -> Self {
        Self {
            values: vec![0.0; self.values.len()],
            ..self.clone()
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn find(&self, r: usize, c: usize) -> Option<usize> {
        let (lo, hi) = (self.row_ptr[r], self.row_ptr[r + 1]);
        self.col_idx[lo..hi].binary_search(&c).ok().map(|k| lo + k)
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.find(r, c).map_or(0.0, |k| self.values[k])
    }

    /// Adds into an existing pattern entry.
    ///
    /// # Panics
    /// If `(r, c)` is not in the pattern.
    pub fn add(&mut self, r: usize, c: usize, v: f64) {
        let k = self
            .find(r, c)
            .unwrap_or_else(|| panic!("entry ({r}, {c}) is outside the sparsity pattern"));
        self.values[k] += v;
    }

    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_ptr[r], self.row_ptr[r + 1]);
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    pub fn clear_row(&mut self, r: usize) {
        let (lo, hi) = (self.row_ptr[r], self.row_ptr[r + 1]);
        self.values[lo..hi].fill(0.0);
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(r);
            *yr = cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum();
        }
    }

    /// `self + alpha · other`; both must share a pattern.
    pub fn axpy(&mut self, alpha: f64, other: &CsrMatrix) {
        assert_eq!(self.col_idx, other.col_idx, "sparsity patterns differ");
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += alpha * b;
        }
    }

    pub fn is_pattern_symmetric(&self) -> bool {
        (0..self.n).all(|r| self.row(r).0.iter().all(|&c| self.find(c, r).is_some()))
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut d = nalgebra::DMatrix::zeros(self.n, self.n);
        for r in 0..self.n {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                d[(r, c)] += v;
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_and_product() {
        let rows = vec![
            BTreeSet::from([0, 1]),
            BTreeSet::from([0, 1, 2]),
            BTreeSet::from([1, 2]),
        ];
        let mut m = CsrMatrix::from_pattern(&rows);
        m.add(0, 0, 2.0);
        m.add(0, 1, -1.0);
        m.add(1, 0, -1.0);
        m.add(1, 1, 2.0);
        m.add(1, 2, -1.0);
        m.add(2, 1, -1.0);
        m.add(2, 2, 2.0);
        assert_eq!(m.mul_vec(&[1.0, 1.0, 1.0]), vec![1.0, 0.0, 1.0]);
        assert!(m.is_pattern_symmetric());
        assert_eq!(m.get(0, 2), 0.0);
        assert_eq!(m.diagonal(), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    #[should_panic]
    fn add_outside_pattern_panics() {
        let mut m = CsrMatrix::identity(2);
        m.add(0, 1, 1.0);
    }
}
