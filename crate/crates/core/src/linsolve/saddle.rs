use std::panic::AssertUnwindSafe;

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::LuError;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::MatMut;

use super::{norm, project_mean_zero_weighted, SolveReport, SolverSettings};
use crate::assembly::{CsrMatrix, Dirichlet};
use crate::error::{Error, Result};

/// Sparse direct solver for
///
/// ```text
/// [ A₁  0   B₁ᵀ ] [u₁]   [f₁]
/// [ 0   A₂  B₂ᵀ ] [u₂] = [f₂]
/// [ B₁  B₂  0   ] [p ]   [g ]
/// ```
///
/// with Dirichlet rows in the velocity blocks. When `mean_weights` is given
/// the pressure constant is fixed by a one-entry bordering row on the
/// first pressure dof, with a Lagrange multiplier that absorbs any
/// incompatibility of the data in the continuity equation of that dof; the
/// pressure is then shifted to zero weighted mean. A dense row `Σ w_k p_k`
/// gives the same answer for compatible data but triples the LU cost. The symbolic
/// factorisation is kept and reused while the sparsity pattern is
/// unchanged.
#[derive(Debug)]
pub struct SaddleSolver {
    b: CsrMatrix,
    bt: CsrMatrix,
    mean_weights: Option<Vec<f64>>,
    cache: Option<Cached>,
}

#[derive(Debug)]
struct Cached {
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    block_patterns: [(Vec<usize>, Vec<usize>); 2],
    symbolic: SymbolicLu<usize>,
}

impl SaddleSolver {
    /// `b` is the `n_p × 2n_v` coupling matrix.
    pub fn new(b: CsrMatrix, mean_weights: Option<Vec<f64>>) -> Result<Self> {
        if !b.ncols().is_multiple_of(2) {
            return Err(Error::invalid("coupling matrix must have 2·n_v columns"));
        }
        if let Some(w) = &mean_weights {
            if w.len() != b.nrows() || !w.first().is_some_and(|&w0| w0 > 0.0) {
                return Err(Error::invalid("mean weights must match the pressure dofs, with w₀ > 0"));
            }
        }
        Ok(SaddleSolver {
            bt: b.transpose(),
            b,
            mean_weights,
            cache: None,
        })
    }

    pub fn coupling(&self) -> &CsrMatrix {
        &self.b
    }

    fn nv(&self) -> usize {
        self.b.ncols() / 2
    }

    fn size(&self) -> usize {
        self.b.ncols() + self.b.nrows() + usize::from(self.mean_weights.is_some())
    }

    /// Builds CSR arrays of the full bordered matrix.
    #[allow(clippy::needless_range_loop)]
    fn build(&self, blocks: [&CsrMatrix; 2], bcs: [&Dirichlet; 2]) -> (Vec<usize>, Vec<usize>, Vec<f64>) {
        let nv = self.nv();
        let np = self.b.nrows();
        let n = self.size();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for c in 0..2 {
            let mask = bcs[c].mask(nv);
            for i in 0..nv {
                let r = c * nv + i;
                for (j, v) in blocks[c].row(i) {
                    col_idx.push(c * nv + j);
                    vals.push(if mask[i] { if i == j { 1.0 } else { 0.0 } } else { v });
                }
                for (k, v) in self.bt.row(r) {
                    col_idx.push(2 * nv + k);
                    vals.push(if mask[i] { 0.0 } else { v });
                }
                row_ptr.push(col_idx.len());
            }
        }
        for k in 0..np {
            for (j, v) in self.b.row(k) {
                col_idx.push(j);
                vals.push(v);
            }
            if let (Some(w), 0) = (&self.mean_weights, k) {
                col_idx.push(n - 1);
                vals.push(w[0]);
            }
            row_ptr.push(col_idx.len());
        }
        if let Some(w) = &self.mean_weights {
            col_idx.push(2 * nv);
            vals.push(w[0]);
            row_ptr.push(col_idx.len());
        }
        (row_ptr, col_idx, vals)
    }

    /// Solves the system. `rhs_u` are the momentum loads (Dirichlet rows are
    /// overwritten with the prescribed values); `rhs_p` defaults to zero.
    /// Returns both velocity components and the pressure, which has zero
    /// weighted mean when bordering is active.
    pub fn solve(
        &mut self,
        blocks: [&CsrMatrix; 2],
        bcs: [&Dirichlet; 2],
        rhs_u: [&[f64]; 2],
        rhs_p: Option<&[f64]>,
        settings: &SolverSettings,
    ) -> Result<([Vec<f64>; 2], Vec<f64>, SolveReport)> {
        let nv = self.nv();
        let np = self.b.nrows();
        for c in 0..2 {
            if blocks[c].nrows() != nv || blocks[c].ncols() != nv || rhs_u[c].len() != nv {
                return Err(Error::invalid("velocity block size does not match the coupling matrix"));
            }
        }
        let n = self.size();
        let (row_ptr, col_idx, vals) = self.build(blocks, bcs);

        let mut rhs = vec![0.0; n];
        for c in 0..2 {
            rhs[c * nv..(c + 1) * nv].copy_from_slice(rhs_u[c]);
            bcs[c].impose(&mut rhs[c * nv..(c + 1) * nv]);
        }
        if let Some(g) = rhs_p {
            rhs[2 * nv..2 * nv + np].copy_from_slice(g);
        }

        let patterns = [pattern_of(blocks[0]), pattern_of(blocks[1])];
        let reuse = self.cache.as_ref().is_some_and(|c| {
            c.row_ptr == row_ptr && c.col_idx == col_idx && c.block_patterns == patterns
        });
        // CSR arrays of A are the CSC arrays of Aᵀ: factor Aᵀ and solve with
        // its transpose.
        let sym = SymbolicSparseColMatRef::new_checked(n, n, &row_ptr, None, &col_idx);
        if !reuse {
            let symbolic = SymbolicLu::try_new(sym).map_err(|e| Error::Singular {
                stage: "saddle symbolic LU".into(),
                detail: format!("{e:?}"),
            })?;
            self.cache = Some(Cached {
                row_ptr: row_ptr.clone(),
                col_idx: col_idx.clone(),
                block_patterns: patterns,
                symbolic,
            });
        }
        let symbolic = self.cache.as_ref().unwrap().symbolic.clone();
        let mat = SparseColMatRef::new(sym, &vals);
        // faer panics on an exactly zero pivot instead of returning an error
        let lu = std::panic::catch_unwind(AssertUnwindSafe(|| Lu::try_new_with_symbolic(symbolic, mat)))
            .map_err(|_| Error::Singular {
                stage: "saddle LU".into(),
                detail: "exactly zero pivot".into(),
            })?
            .map_err(|e| Error::Singular {
                stage: "saddle LU".into(),
                detail: match e {
                    LuError::SymbolicSingular { index } => format!("no pivot found at elimination step {index}"),
                    other => format!("{other:?}"),
                },
            })?;

        let apply = |x: &[f64]| -> Vec<f64> {
            (0..n)
                .map(|i| (row_ptr[i]..row_ptr[i + 1]).map(|s| vals[s] * x[col_idx[s]]).sum())
                .collect()
        };
        let mut x = rhs.clone();
        lu.solve_transpose_in_place(MatMut::from_column_major_slice_mut(&mut x, n, 1));
        let bnorm = norm(&rhs);
        let mut resid: Vec<f64> = rhs.iter().zip(apply(&x)).map(|(b, ax)| b - ax).collect();
        let mut rel = norm(&resid) / bnorm.max(f64::MIN_POSITIVE);
        let mut iterations = 1;
        // iterative refinement
        while rel > settings.rel_tol && norm(&resid) > settings.abs_tol && iterations < 4 && rel.is_finite() {
            lu.solve_transpose_in_place(MatMut::from_column_major_slice_mut(&mut resid, n, 1));
            for (xi, d) in x.iter_mut().zip(&resid) {
                *xi += d;
            }
            resid = rhs.iter().zip(apply(&x)).map(|(b, ax)| b - ax).collect();
            rel = norm(&resid) / bnorm.max(f64::MIN_POSITIVE);
            iterations += 1;
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular {
                stage: "saddle LU".into(),
                detail: "factorisation produced non-finite values (singular pivot)".into(),
            });
        }
        let report = SolveReport {
            iterations,
            residual: if bnorm > 0.0 { rel } else { norm(&resid) },
            converged: rel <= settings.rel_tol || norm(&resid) <= settings.abs_tol,
        };
        let u = [x[..nv].to_vec(), x[nv..2 * nv].to_vec()];
        let mut p = x[2 * nv..2 * nv + np].to_vec();
        if let Some(w) = &self.mean_weights {
            p = project_mean_zero_weighted(&p, w);
        }
        Ok((u, p, report))
    }
}

fn pattern_of(m: &CsrMatrix) -> (Vec<usize>, Vec<usize>) {
    (m.pattern().row_ptr().to_vec(), m.pattern().col_idx().to_vec())
}

/// One-shot saddle solve without caching.
pub fn solve_saddle(
    blocks: [&CsrMatrix; 2],
    bcs: [&Dirichlet; 2],
    b: &CsrMatrix,
    rhs_u: [&[f64]; 2],
    mean_weights: Option<Vec<f64>>,
    settings: &SolverSettings,
) -> Result<([Vec<f64>; 2], Vec<f64>, SolveReport)> {
    SaddleSolver::new(b.clone(), mean_weights)?.solve(blocks, bcs, rhs_u, None, settings)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_blocks_with_zero_coupling() {
        let a = CsrMatrix::identity(3);
        let bc = Dirichlet::new();
        // the bordering row alone fixes the single pressure dof
        let b1 = CsrMatrix::from_triplets(1, 6, &[(0, 0, 0.0)]).unwrap();
        let mut s = SaddleSolver::new(b1, Some(vec![1.0])).unwrap();
        let (u, p, r) = s
            .solve([&a, &a], [&bc, &bc], [&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]], None, &SolverSettings::default())
            .unwrap();
        assert!(r.converged);
        assert_eq!(u[0], vec![1.0, 2.0, 3.0]);
        assert_eq!(u[1], vec![4.0, 5.0, 6.0]);
        assert_eq!(p, vec![0.0]);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = CsrMatrix::from_dense(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        let b = CsrMatrix::from_triplets(1, 4, &[(0, 0, 1.0)]).unwrap();
        let bc = Dirichlet::new();
        let mut s = SaddleSolver::new(b, None).unwrap();
        let r = s.solve([&a, &a], [&bc, &bc], [&[1.0, 0.0], &[0.0, 1.0]], None, &SolverSettings::default());
        assert!(matches!(r, Err(Error::Singular { .. })), "{r:?}");
    }
}
