use std::collections::BTreeMap;

use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

/// Prescribed values on a set of dofs of one scalar system.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dirichlet {
    values: BTreeMap<usize, f64>,
}

impl Dirichlet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets `dof = value`. A dof shared by two sides (a corner) may be set
    /// twice only with the same value.
    pub fn set(&mut self, dof: usize, value: f64) -> Result<()> {
        if let Some(&old) = self.values.get(&dof) {
            let scale = old.abs().max(value.abs()).max(1.0);
            if (old - value).abs() > 1e-12 * scale {
                return Err(Error::invalid(format!(
                    "conflicting boundary values {old} and {value} on dof {dof}"
                )));
            }
        }
        self.values.insert(dof, value);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, dof: usize) -> bool {
        self.values.contains_key(&dof)
    }

    pub fn get(&self, dof: usize) -> Option<f64> {
        self.values.get(&dof).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().map(|(&d, &v)| (d, v))
    }

    /// Mask with `true` on constrained dofs.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &d in self.values.keys() {
            m[d] = true;
        }
        m
    }

    /// Writes the prescribed values into `x`.
    pub fn impose(&self, x: &mut [f64]) {
        for (&d, &v) in &self.values {
            x[d] = v;
        }
    }

    /// Row replacement: constrained rows become identity rows and the
    /// right-hand side carries the value. With `symmetric` the constrained
    /// columns are also eliminated, moving their contribution to the
    /// right-hand side, so a symmetric matrix stays symmetric. The sparsity
    /// pattern is kept.
    pub fn apply(&self, mat: &mut CsrMatrix, rhs: &mut [f64], symmetric: bool) {
        if symmetric {
            let mask = self.mask(mat.ncols());
            let mut g = vec![0.0; mat.ncols()];
            self.impose(&mut g);
            for i in 0..mat.nrows() {
                if mask[i] {
                    continue;
                }
                let (cols, vals) = mat.row_values_mut(i);
                for (&j, v) in cols.iter().zip(vals.iter_mut()) {
                    if mask[j] {
                        rhs[i] -= *v * g[j];
                        *v = 0.0;
                    }
                }
            }
        }
        for (&d, &v) in &self.values {
            let (cols, vals) = mat.row_values_mut(d);
            for (&j, a) in cols.iter().zip(vals.iter_mut()) {
                *a = if j == d { 1.0 } else { 0.0 };
            }
            rhs[d] = v;
        }
    }
}
