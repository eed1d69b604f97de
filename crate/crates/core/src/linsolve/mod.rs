//! Krylov solvers, the direct saddle-point solver and pressure nullspace
//! handling.

use std::fmt;

mod krylov;
mod saddle;

pub use krylov::{solve_nonsym, solve_nonsym_from, solve_spd, solve_spd_from};
pub use saddle::{solve_saddle, SaddleSolver};

use crate::assembly::CsrMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preconditioner {
    None,
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// `None` means ten times the system size.
    pub max_iter: Option<usize>,
    pub preconditioner: Preconditioner,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_iter: None,
            preconditioner: Preconditioner::Jacobi,
        }
    }
}

impl SolverSettings {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::invalid("solver tolerances must be positive"));
        }
        Ok(())
    }

    fn max_iter_for(&self, n: usize) -> usize {
        self.max_iter.unwrap_or(10 * n.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// `‖b − Ax‖ / ‖b‖`, or the absolute residual when `b = 0`.
    pub residual: f64,
    pub converged: bool,
}

impl fmt::Display for SolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} after {} iterations, relative residual {:.3e}",
            if self.converged { "converged" } else { "not converged" },
            self.iterations,
            self.residual
        )
    }
}

impl SolveReport {
    /// Turns a non-converged report into an error for `stage`.
    pub fn require(self, stage: &str) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                stage: stage.to_string(),
                report: self,
            })
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Subtracts the `M_p`-weighted mean so that `1ᵀ M_p p = 0`.
pub fn project_mean_zero(p: &[f64], mass: &CsrMatrix) -> Vec<f64> {
    let weights = mass_row_sums(mass);
    project_mean_zero_weighted(p, &weights)
}

/// Same as [`project_mean_zero`] with precomputed row sums `∫ψ_k`.
pub fn project_mean_zero_weighted(p: &[f64], weights: &[f64]) -> Vec<f64> {
    let c = dot(weights, p) / weights.iter().sum::<f64>();
    p.iter().map(|v| v - c).collect()
}

pub fn mass_row_sums(mass: &CsrMatrix) -> Vec<f64> {
    (0..mass.nrows()).map(|i| mass.row(i).map(|(_, v)| v).sum()).collect()
}

/// Solves the pure-Neumann problem `A p = b` whose matrix has the constants
/// as nullspace. The right-hand side is first made orthogonal to the
/// constants, and the solution is returned with zero weighted mean.
pub fn solve_neumann(
    a: &CsrMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    weights: &[f64],
    settings: &SolverSettings,
) -> (Vec<f64>, SolveReport) {
    let n = b.len() as f64;
    let defect = b.iter().sum::<f64>();
    let scale = b.iter().map(|v| v.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
    if defect.abs() > 1e-6 * scale {
        log::warn!("Neumann right-hand side incompatible: Σb = {defect:e} (scale {scale:e})");
    }
    let rhs: Vec<f64> = b.iter().map(|v| v - defect / n).collect();
    let (x, report) = solve_spd_from(a, &rhs, x0, settings);
    (project_mean_zero_weighted(&x, weights), report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_zero_projection_on_one_element() {
        // Q1 mass on the unit square: row sums are 1/4.
        let m = CsrMatrix::from_dense(&[
            vec![4.0 / 36.0, 2.0 / 36.0, 1.0 / 36.0, 2.0 / 36.0],
            vec![2.0 / 36.0, 4.0 / 36.0, 2.0 / 36.0, 1.0 / 36.0],
            vec![1.0 / 36.0, 2.0 / 36.0, 4.0 / 36.0, 2.0 / 36.0],
            vec![2.0 / 36.0, 1.0 / 36.0, 2.0 / 36.0, 4.0 / 36.0],
        ]);
        let p = project_mean_zero(&[2.0, 0.0, 0.0, 0.0], &m);
        for (a, b) in p.iter().zip([1.5, -0.5, -0.5, -0.5]) {
            assert!((a - b).abs() < 1e-15);
        }
        let c = project_mean_zero(&[3.0; 4], &m);
        assert!(c.iter().all(|v| v.abs() < 1e-15));
        assert_eq!(project_mean_zero(&p, &m), p);
    }

    #[test]
    fn report_display_and_require() {
        let r = SolveReport {
            iterations: 3,
            residual: 0.5,
            converged: false,
        };
        assert!(r.to_string().contains("not converged"));
        assert!(r.require("x").is_err());
    }
}
