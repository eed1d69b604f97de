//! Free decay of a random velocity field in a closed box: constant dynamic
//! viscosity, no forcing, no-slip walls. Used to observe the discrete
//! energy inequalities.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assembly::{Field, VectorField};
use crate::diagnostics::{stability_verdict, StabilityMode, StabilityVerdict};
use crate::error::Result;
use crate::linsolve::SolverSettings;
use crate::mesh::{FunctionSpace, Mesh, Rect, Side};
use crate::rheology::ViscosityModel;
use crate::stepper::{EnergyReport, FluidProperties, Problem, Scheme, Simulation, StepperSettings, TimeGrid, VelocityConstraint};

/// Cardinal quadratic B-spline on `[0, 3]`.
fn spline(t: f64) -> f64 {
    if !(0.0..=3.0).contains(&t) {
        0.0
    } else if t < 1.0 {
        0.5 * t * t
    } else if t < 2.0 {
        0.5 * (-2.0 * t * t + 6.0 * t - 3.0)
    } else {
        0.5 * (3.0 - t) * (3.0 - t)
    }
}

fn spline_slope(t: f64) -> f64 {
    if !(0.0..=3.0).contains(&t) {
        0.0
    } else if t < 1.0 {
        t
    } else if t < 2.0 {
        3.0 - 2.0 * t
    } else {
        t - 3.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayConfig {
    pub n: usize,
    pub mu: f64,
    /// Density `1 + amp·sin(πx) sin(πy)` on the unit square.
    pub density_amplitude: f64,
    /// Velocity scale of the random initial field.
    pub velocity_amplitude: f64,
    pub seed: u64,
}

impl Default for DecayConfig {
    fn default() -> Self {
        DecayConfig {
            n: 8,
            mu: 0.01,
            density_amplitude: 0.0,
            velocity_amplitude: 1.0,
            seed: 7,
        }
    }
}

impl DecayConfig {
    pub fn problem(&self) -> Result<Problem> {
        let mesh = Arc::new(Mesh::new(Rect::unit_square(), self.n, self.n)?);
        let amp = self.density_amplitude;
        let pi = std::f64::consts::PI;
        Ok(Problem {
            name: "decay".into(),
            mesh,
            viscosity: ViscosityModel::ConstantDynamic(self.mu),
            forcing: None,
            velocity_bc: Side::ALL
                .iter()
                .flat_map(|&s| [VelocityConstraint::zero(s, 0), VelocityConstraint::zero(s, 1)])
                .collect(),
            density_inflow: None,
            initial_velocity: Arc::new(|_, _, _| [0.0, 0.0]),
            initial_density: Arc::new(move |x, y, _| 1.0 + amp * (pi * x).sin() * (pi * y).sin()),
            exact_pressure: None,
            properties: FluidProperties::new(1.0 - amp.abs(), 1.0 + amp.abs(), 0.5 * (1.0 - amp.abs()), self.mu)?,
            t0: 0.0,
        })
    }

    /// Random solenoidal velocity vanishing on the boundary: the curl of a
    /// C¹ quadratic spline on the mesh lattice, whose basis functions are
    /// supported inside the square. Such a curl is continuous and
    /// piecewise biquadratic, so interpolation onto `space` is exact.
    pub fn initial_velocity(&self, space: &Arc<FunctionSpace>) -> Result<VectorField> {
        let n = space.mesh().nx();
        let h = 1.0 / n as f64;
        let m = n.saturating_sub(2);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let a = self.velocity_amplitude * h;
        let coef: Vec<f64> = (0..m * m).map(|_| rng.gen_range(-a..=a)).collect();
        let curl = |x: f64, y: f64| {
            let mut u = [0.0, 0.0];
            for j in 0..m {
                let ty = y / h - j as f64;
                let (by, dby) = (spline(ty), spline_slope(ty) / h);
                if by == 0.0 && dby == 0.0 {
                    continue;
                }
                for i in 0..m {
                    let tx = x / h - i as f64;
                    let c = coef[j * m + i];
                    u[0] += c * spline(tx) * dby;
                    u[1] -= c * spline_slope(tx) / h * by;
                }
            }
            u
        };
        let coords = space.dof_coords();
        let vals: Vec<[f64; 2]> = coords.iter().map(|&[x, y]| curl(x, y)).collect();
        Ok([
            Field::from_values(space, vals.iter().map(|v| v[0]).collect())?,
            Field::from_values(space, vals.iter().map(|v| v[1]).collect())?,
        ])
    }

    pub fn simulation(&self, scheme: Scheme, grid: TimeGrid, settings: StepperSettings) -> Result<Simulation> {
        let mut sim = Simulation::new(self.problem()?, scheme, grid, settings)?;
        let u0 = self.initial_velocity(sim.velocity_space())?;
        sim.set_initial_velocity(u0)?;
        Ok(sim)
    }

    /// Runs `steps` steps of size `tau` and returns the report series.
    pub fn run(&self, scheme: Scheme, tau: f64, steps: usize, settings: StepperSettings) -> Result<Vec<EnergyReport>> {
        let mut sim = self.simulation(scheme, TimeGrid::new(tau * steps as f64, steps)?, settings)?;
        sim.run(|_, _| Ok(()))
    }

    /// Runs the decay problem and judges it against the budget the scheme
    /// is expected to satisfy: `K + 2τD` for the coupled BDF1 scheme,
    /// `K̂ + τ²P` plus the weak divergence of `û` for the fractional step,
    /// finiteness only for BDF2.
    pub fn verify(&self, scheme: Scheme, tau: f64, steps: usize, tol: f64, solver: SolverSettings) -> Result<StabilityVerdict> {
        let settings = StepperSettings {
            solver,
            check_weak_divergence: scheme == Scheme::Fs1,
            ..StepperSettings::default()
        };
        let reports = self.run(scheme, tau, steps, settings)?;
        let mode = match scheme {
            Scheme::Bdf1 => StabilityMode::CoupledDecay { tol },
            Scheme::Fs1 => StabilityMode::FractionalDecay { tol },
            Scheme::Bdf2 => StabilityMode::Finite,
        };
        Ok(stability_verdict(&format!("decay {scheme} tau={tau}"), &reports, mode))
    }
}
