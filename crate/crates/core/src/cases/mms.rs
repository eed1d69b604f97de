//! Manufactured solution on the unit square:
//! `f(t) = 1/(1+t)`, `U(y) = 1 + y − y²`, `ρ = f e^{x/U}`,
//! `u = (U f, 0)`, `p = f sin(2 − 2x)`, `ν = e^{−x/U}/f`, so `μ = ρν = 1`.

use std::sync::Arc;

use crate::assembly::norms::{l2_error, l2_error_mean_free, vector_l2_error};
use crate::diagnostics::{ErrorLevel, ErrorTable};
use crate::error::Result;
use crate::mesh::{Mesh, Rect, Side};
use crate::rheology::ViscosityModel;
use crate::stepper::{
    DensityInflow, FluidProperties, Problem, Scheme, Simulation, StepperSettings, TimeGrid, VelocityConstraint,
};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MmsSolution;

impl MmsSolution {
    pub fn f(t: f64) -> f64 {
        1.0 / (1.0 + t)
    }

    pub fn profile(y: f64) -> f64 {
        1.0 + y - y * y
    }

    pub fn density(x: f64, y: f64, t: f64) -> f64 {
        Self::f(t) * (x / Self::profile(y)).exp()
    }

    pub fn velocity(_x: f64, y: f64, t: f64) -> [f64; 2] {
        [Self::profile(y) * Self::f(t), 0.0]
    }

    pub fn pressure(x: f64, _y: f64, t: f64) -> f64 {
        (2.0 - 2.0 * x).sin() * Self::f(t)
    }

    pub fn kinematic_viscosity(x: f64, y: f64, t: f64) -> f64 {
        (-x / Self::profile(y)).exp() / Self::f(t)
    }

    /// Gravity-like acceleration `g = (−U f², 0)`.
    pub fn g(_x: f64, y: f64, t: f64) -> [f64; 2] {
        let f = Self::f(t);
        [-Self::profile(y) * f * f, 0.0]
    }

    /// Momentum residual of the fields above with body force `ρg` alone:
    /// `−Δu₁ = 2f` and `∂ₓp = −2f cos(2 − 2x)`, the other terms cancel.
    pub fn residual(x: f64, _y: f64, t: f64) -> [f64; 2] {
        [2.0 * Self::f(t) * (1.0 - (2.0 - 2.0 * x).cos()), 0.0]
    }

    /// Body force `ρg + r` for which the fields solve the momentum equation.
    pub fn forcing(x: f64, y: f64, t: f64) -> [f64; 2] {
        let rho = Self::density(x, y, t);
        let g = Self::g(x, y, t);
        let r = Self::residual(x, y, t);
        [rho * g[0] + r[0], rho * g[1] + r[1]]
    }

    /// The problem on an `nx × ny` mesh of the unit square.
    pub fn problem(nx: usize, ny: usize) -> Result<Problem> {
        let mesh = Arc::new(Mesh::new(Rect::unit_square(), nx, ny)?);
        let mut velocity_bc = Vec::new();
        for side in Side::ALL {
            for c in 0..2 {
                velocity_bc.push(VelocityConstraint {
                    side,
                    component: c,
                    value: Arc::new(move |x, y, t| Self::velocity(x, y, t)[c]),
                });
            }
        }
        Ok(Problem {
            name: "mms".into(),
            mesh,
            viscosity: ViscosityModel::prescribed(Self::kinematic_viscosity),
            forcing: Some(Arc::new(|x, y, t, _rho| Self::forcing(x, y, t))),
            velocity_bc,
            density_inflow: Some(DensityInflow {
                value: Arc::new(Self::density),
                velocity: Arc::new(Self::velocity),
            }),
            initial_velocity: Arc::new(Self::velocity),
            initial_density: Arc::new(Self::density),
            exact_pressure: Some(Arc::new(Self::pressure)),
            properties: FluidProperties::new(0.5, std::f64::consts::E, 0.1, 1e-3)?,
            t0: 0.0,
        })
    }
}

/// Refinement ladder: level `k` uses `n0·2^k` cells per side and step
/// `τ0/2^k`, all up to `t_end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmsLadder {
    pub levels: usize,
    pub n0: usize,
    pub tau0: f64,
    pub t_end: f64,
}

impl Default for MmsLadder {
    fn default() -> Self {
        MmsLadder {
            levels: 5,
            n0: 4,
            tau0: 0.1,
            t_end: 1.0,
        }
    }
}

impl MmsLadder {
    /// Runs one level and returns its errors at `t_end`.
    pub fn run_level(&self, scheme: Scheme, level: usize, settings: &StepperSettings) -> Result<ErrorLevel> {
        let n = self.n0 << level;
        let tau = self.tau0 / (1u64 << level) as f64;
        let grid = TimeGrid::with_step(tau, self.t_end)?;
        let mut sim = Simulation::new(MmsSolution::problem(n, n)?, scheme, grid, settings.clone())?;
        sim.run(|_, _| Ok(()))?;
        let st = sim.state();
        let fe = sim.fe();
        let t = st.t;
        Ok(ErrorLevel {
            n,
            h: 1.0 / n as f64,
            tau,
            u: vector_l2_error(fe, &st.u, |x, y| MmsSolution::velocity(x, y, t))?,
            p: l2_error_mean_free(fe, &st.p, |x, y| MmsSolution::pressure(x, y, t))?,
            rho: l2_error(fe, &st.rho, |x, y| MmsSolution::density(x, y, t))?,
        })
    }

    /// Runs every level, concurrently, and collects the error table.
    pub fn run(&self, scheme: Scheme, settings: &StepperSettings) -> Result<ErrorTable> {
        let results: Vec<Result<ErrorLevel>> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..self.levels)
                .map(|k| s.spawn(move || self.run_level(scheme, k, settings)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("level panicked")).collect()
        });
        let levels = results.into_iter().collect::<Result<Vec<_>>>()?;
        ErrorTable::new(scheme, levels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pointwise_values() {
        assert_eq!(MmsSolution::velocity(0.3, 0.0, 0.0), [1.0, 0.0]);
        assert_eq!(MmsSolution::density(0.0, 0.0, 0.0), 1.0);
        assert_eq!(MmsSolution::pressure(0.0, 0.7, 0.0), 2f64.sin());
        for &(x, y, t) in &[(0.1, 0.2, 0.0), (0.9, 0.5, 3.0), (0.4, 0.99, 0.25)] {
            let mu = MmsSolution::density(x, y, t) * MmsSolution::kinematic_viscosity(x, y, t);
            assert!((mu - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn forcing_limits() {
        for y in [0.0, 0.3, 1.0] {
            let f = MmsSolution::forcing(1.0, y, 0.5);
            let rho = MmsSolution::density(1.0, y, 0.5);
            let g = MmsSolution::g(1.0, y, 0.5);
            assert_eq!(f, [rho * g[0], rho * g[1]]);
        }
        let far = MmsSolution::forcing(0.3, 0.4, 1e12);
        assert!(far[0].abs() < 1e-11 && far[1] == 0.0);
    }
}
