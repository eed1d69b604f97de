use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::FunctionSpace;

/// CSR structure: sorted, duplicate-free column indices per row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
}

impl Pattern {
    /// Builds a pattern from per-row column sets.
    pub fn from_rows(ncols: usize, rows: Vec<BTreeSet<usize>>) -> Self {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut col_idx = Vec::with_capacity(rows.iter().map(|r| r.len()).sum());
        row_ptr.push(0);
        for r in &rows {
            col_idx.extend(r.iter().copied());
            row_ptr.push(col_idx.len());
        }
        Pattern {
            nrows: rows.len(),
            ncols,
            row_ptr,
            col_idx,
        }
    }

    /// Coupling pattern of a test space against a trial space on the same mesh.
    pub fn for_spaces(test: &FunctionSpace, trial: &FunctionSpace) -> Self {
        let mut rows = vec![BTreeSet::new(); test.num_dofs()];
        for cell in 0..test.mesh().num_cells() {
            let tr = trial.cell_dofs(cell);
            for &i in test.cell_dofs(cell) {
                rows[i].extend(tr.iter().copied());
            }
        }
        Self::from_rows(trial.num_dofs(), rows)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    /// Storage slot of `(i, j)`, if structurally present.
    pub fn slot(&self, i: usize, j: usize) -> Option<usize> {
        self.row(i).binary_search(&j).ok().map(|k| self.row_ptr[i] + k)
    }
}

/// Pattern plus, for every cell, the storage slot of each local
/// (test, trial) pair, so element matrices scatter without searching.
#[derive(Debug)]
pub struct CellPattern {
    pattern: Arc<Pattern>,
    slots: Vec<usize>,
    n_test: usize,
    n_trial: usize,
}

impl CellPattern {
    pub fn new(test: &FunctionSpace, trial: &FunctionSpace) -> Arc<Self> {
        let pattern = Pattern::for_spaces(test, trial);
        let (n_test, n_trial) = (test.dofs_per_cell(), trial.dofs_per_cell());
        let ncell = test.mesh().num_cells();
        let mut slots = Vec::with_capacity(ncell * n_test * n_trial);
        for cell in 0..ncell {
            for &i in test.cell_dofs(cell) {
                for &j in trial.cell_dofs(cell) {
                    slots.push(pattern.slot(i, j).expect("cell coupling is in the pattern"));
                }
            }
        }
        Arc::new(CellPattern {
            pattern: Arc::new(pattern),
            slots,
            n_test,
            n_trial,
        })
    }

    pub fn pattern(&self) -> &Arc<Pattern> {
        &self.pattern
    }

    pub(crate) fn cell_slots(&self, cell: usize) -> &[usize] {
        let n = self.n_test * self.n_trial;
        &self.slots[cell * n..(cell + 1) * n]
    }

    pub fn zeros(&self) -> CsrMatrix {
        CsrMatrix::zeros(self.pattern.clone())
    }
}

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pattern: Arc<Pattern>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(pattern: Arc<Pattern>) -> Self {
        let values = vec![0.0; pattern.nnz()];
        CsrMatrix { pattern, values }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| BTreeSet::from([i])).collect();
        let mut m = Self::zeros(Arc::new(Pattern::from_rows(n, rows)));
        m.values.fill(1.0);
        m
    }

    /// Sums duplicate entries.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut rows = vec![BTreeSet::new(); nrows];
        for &(i, j, _) in triplets {
            if i >= nrows || j >= ncols {
                return Err(Error::invalid(format!(
                    "triplet ({i}, {j}) outside {nrows} x {ncols}"
                )));
            }
            rows[i].insert(j);
        }
        let mut m = Self::zeros(Arc::new(Pattern::from_rows(ncols, rows)));
        for &(i, j, v) in triplets {
            let s = m.pattern.slot(i, j).expect("inserted above");
            m.values[s] += v;
        }
        Ok(m)
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        let trip: Vec<_> = rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| {
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(move |(j, &v)| (i, j, v))
            })
            .collect();
        Self::from_triplets(rows.len(), ncols, &trip).expect("dense indices are in range")
    }

    pub fn pattern(&self) -> &Arc<Pattern> {
        &self.pattern
    }

    pub fn nrows(&self) -> usize {
        self.pattern.nrows
    }

    pub fn ncols(&self) -> usize {
        self.pattern.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.pattern.slot(i, j).map_or(0.0, |s| self.values[s])
    }

    /// Iterates `(column, value)` over the stored entries of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.pattern.row_ptr[i]..self.pattern.row_ptr[i + 1];
        self.pattern.col_idx[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    pub(crate) fn row_values_mut(&mut self, i: usize) -> (&[usize], &mut [f64]) {
        let r = self.pattern.row_ptr[i]..self.pattern.row_ptr[i + 1];
        (&self.pattern.col_idx[r.clone()], &mut self.values[r])
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows()).map(|i| self.get(i, i)).collect()
    }

    /// `y = A x`
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols());
        debug_assert_eq!(y.len(), self.nrows());
        let (rp, ci) = (&self.pattern.row_ptr, &self.pattern.col_idx);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in rp[i]..rp[i + 1] {
                s += self.values[k] * x[ci[k]];
            }
            *yi = s;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows()];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `y = Aᵀ x`
    pub fn mul_transpose_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.ncols()];
        for (i, &xi) in x.iter().enumerate() {
            for (j, v) in self.row(i) {
                y[j] += v * xi;
            }
        }
        y
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut trip = Vec::with_capacity(self.nnz());
        for i in 0..self.nrows() {
            trip.extend(self.row(i).map(|(j, v)| (j, i, v)));
        }
        Self::from_triplets(self.ncols(), self.nrows(), &trip).expect("transposed indices are valid")
    }

    /// `xᵀ A y`
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        self.mul_vec(y).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// `self += s · other` for matrices sharing a pattern.
    pub fn add_scaled(&mut self, s: f64, other: &CsrMatrix) -> Result<()> {
        if !Arc::ptr_eq(&self.pattern, &other.pattern) && self.pattern != other.pattern {
            return Err(Error::invalid("matrices do not share a sparsity pattern"));
        }
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += s * b;
        }
        Ok(())
    }

    pub fn scale(&mut self, s: f64) {
        self.values.iter_mut().for_each(|v| *v *= s);
    }

    /// Largest absolute entry of `self - other`, comparing by position.
    pub fn max_abs_diff(&self, other: &CsrMatrix) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.nrows().max(other.nrows()) {
            if i < self.nrows() {
                for (j, v) in self.row(i) {
                    m = m.max((v - other.get(i, j)).abs());
                }
            }
            if i < other.nrows() {
                for (j, v) in other.row(i) {
                    m = m.max((v - self.get(i, j)).abs());
                }
            }
        }
        m
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols()]; self.nrows()];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] += v;
            }
        }
        d
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.nrows() == self.ncols() && self.max_abs_diff(&self.transpose()) <= tol
    }

    /// Adds an element matrix through precomputed slots.
    #[inline]
    pub(crate) fn scatter(&mut self, slots: &[usize], local: &[f64]) {
        for (&s, &v) in slots.iter().zip(local) {
            self.values[s] += v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{Degree, Mesh, Rect};

    #[test]
    fn pattern_rows_are_sorted_and_unique() {
        let mesh = Arc::new(Mesh::new(Rect::unit_square(), 3, 2).unwrap());
        let v = FunctionSpace::new(mesh.clone(), Degree::Q2);
        let p = FunctionSpace::new(mesh, Degree::Q1);
        for pat in [Pattern::for_spaces(&v, &v), Pattern::for_spaces(&p, &v)] {
            for i in 0..pat.nrows() {
                assert!(pat.row(i).windows(2).all(|w| w[0] < w[1]));
            }
            assert!(pat.row_ptr().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn triplets_sum_duplicates_and_multiply() {
        let a = CsrMatrix::from_triplets(2, 3, &[(0, 0, 1.0), (0, 0, 2.0), (1, 2, -1.0), (0, 1, 4.0)]).unwrap();
        assert_eq!(a.get(0, 0), 3.0);
        assert_eq!(a.mul_vec(&[1.0, 1.0, 1.0]), vec![7.0, -1.0]);
        assert_eq!(a.mul_transpose_vec(&[1.0, 2.0]), vec![3.0, 4.0, -2.0]);
        assert_eq!(a.transpose().to_dense(), vec![vec![3.0, 0.0], vec![4.0, 0.0], vec![0.0, -1.0]]);
        assert!(CsrMatrix::from_triplets(1, 1, &[(1, 0, 1.0)]).is_err());
    }

    #[test]
    fn add_scaled_requires_shared_pattern() {
        let mut a = CsrMatrix::identity(3);
        let b = CsrMatrix::identity(3);
        a.add_scaled(2.0, &b).unwrap();
        assert_eq!(a.diagonal(), vec![3.0; 3]);
        let c = CsrMatrix::from_dense(&[vec![1.0, 1.0], vec![0.0, 1.0]]);
        assert!(a.add_scaled(1.0, &c).is_err());
    }
}
