//! Time stepping: coupled BDF1, coupled BDF2 and the first-order
//! fractional-step scheme, with density transport and energy monitoring.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

mod coupled;
mod density;
mod fractional;
mod monitor;
mod problem;

pub use density::{density_step_bdf1, density_step_bdf2, density_step_weak, DensityOptions, DensityTransport};
pub use monitor::{monitor, EnergyReport};
pub use problem::{
    DensityInflow, FluidProperties, ForcingFn, Problem, ScalarFn, VectorFn, VelocityConstraint,
};

use crate::assembly::{
    vector_interpolate, Assembler, CsrMatrix, FeContext, Field, QpScalar, QpVector, VectorField,
};
use crate::error::{Error, Result};
use crate::linsolve::{mass_row_sums, solve_neumann, SaddleSolver, SolverSettings};
use crate::mesh::{Degree, FunctionSpace};
use crate::rheology::{dynamic_viscosity, extrapolated_viscosity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Bdf1,
    Bdf2,
    Fs1,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Bdf1, Scheme::Bdf2, Scheme::Fs1];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Bdf1 => "bdf1",
            Scheme::Bdf2 => "bdf2",
            Scheme::Fs1 => "fs1",
        }
    }

    pub fn order(self) -> usize {
        match self {
            Scheme::Bdf2 => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bdf1" => Ok(Scheme::Bdf1),
            "bdf2" => Ok(Scheme::Bdf2),
            "fs1" => Ok(Scheme::Fs1),
            _ => Err(Error::config("scheme", format!("unknown scheme `{s}` (bdf1, bdf2, fs1)"))),
        }
    }
}

/// Uniform time grid with `τ = T/N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    tau: f64,
    t_end: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_end: f64, steps: usize) -> Result<Self> {
        if !(t_end > 0.0) || steps == 0 {
            return Err(Error::invalid(format!("need T > 0 and N ≥ 1, got T = {t_end}, N = {steps}")));
        }
        Ok(TimeGrid {
            tau: t_end / steps as f64,
            t_end,
            steps,
        })
    }

    /// Grid with step `tau`; `t_end` must be a whole multiple of it.
    pub fn with_step(tau: f64, t_end: f64) -> Result<Self> {
        if !(tau > 0.0) || !(t_end >= tau) {
            return Err(Error::invalid(format!("need 0 < τ ≤ T, got τ = {tau}, T = {t_end}")));
        }
        let n = (t_end / tau).round();
        if (n * tau - t_end).abs() > 1e-9 * t_end {
            return Err(Error::invalid(format!("T = {t_end} is not a multiple of τ = {tau}")));
        }
        Ok(TimeGrid {
            tau,
            t_end,
            steps: n as usize,
        })
    }

    /// A grid that takes no steps.
    pub fn empty() -> Self {
        TimeGrid {
            tau: 1.0,
            t_end: 0.0,
            steps: 0,
        }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn steps(&self) -> usize {
        self.steps
    }
}

/// How the fractional-step scheme obtains `p_0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PressureInit {
    /// Interpolate the exact pressure; falls back to `Poisson` if none.
    Exact,
    /// `((1/ρ₀)∇p₀, ∇q) = (f/ρ₀ − (u₀·∇)u₀, ∇q)`.
    Poisson,
    Zero,
}

/// Extrapolation of the explicit term `∇ᵀu ∇μ` in the BDF2 scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransposeExtrapolation {
    /// `∇ᵀu* ∇μ(ρ_{n+1}, u*)` with `u* = 2u_n − u_{n−1}`.
    Velocity,
    /// `2∇ᵀu_n ∇μ_n − ∇ᵀu_{n−1} ∇μ_{n−1}`.
    Terms,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepperSettings {
    pub solver: SolverSettings,
    pub density_transport: DensityTransport,
    /// Clamp nodal densities to the monitor floor after each density step.
    pub clamp_density: bool,
    pub pressure_init: PressureInit,
    pub transpose_extrapolation: TransposeExtrapolation,
    /// Measure the weak divergence of `û` after each fractional step.
    pub check_weak_divergence: bool,
    /// Keep the inputs and matrix of the last momentum assembly.
    pub keep_operators: bool,
}

impl Default for StepperSettings {
    fn default() -> Self {
        StepperSettings {
            solver: SolverSettings::default(),
            density_transport: DensityTransport::Galerkin,
            clamp_density: false,
            pressure_init: PressureInit::Poisson,
            transpose_extrapolation: TransposeExtrapolation::Velocity,
            check_weak_divergence: false,
            keep_operators: false,
        }
    }
}

/// Fields carried from one step to the next.
#[derive(Debug, Clone)]
pub struct SimState {
    pub step: usize,
    pub t: f64,
    pub u: VectorField,
    pub u_prev: Option<VectorField>,
    /// End-of-step velocity at quadrature points (fractional step only).
    pub u_hat: Option<QpVector>,
    /// L2 projection of `û` onto the velocity space.
    pub u_hat_nodal: Option<VectorField>,
    pub p: Field,
    pub rho: Field,
    pub rho_prev: Option<Field>,
    /// Nodal kinematic viscosity.
    pub nu: Field,
    /// Nodal dynamic viscosity.
    pub mu: Field,
    pub mu_prev: Option<Field>,
    pub weak_divergence: Option<f64>,
}

/// Inputs and result of the last momentum-block assembly.
#[derive(Debug, Clone)]
pub struct MomentumSnapshot {
    pub mass_weight: QpScalar,
    pub mu: Field,
    pub rho: Field,
    pub wind: VectorField,
    pub block: CsrMatrix,
}

/// A problem advanced in time by one scheme.
#[derive(Debug)]
pub struct Simulation {
    problem: Problem,
    scheme: Scheme,
    grid: TimeGrid,
    settings: StepperSettings,
    asm: Assembler,
    q1: Arc<FunctionSpace>,
    q2: Arc<FunctionSpace>,
    /// `∫ψ_k`, the pressure mean weights.
    p_weights: Vec<f64>,
    saddle: Option<SaddleSolver>,
    divergence: CsrMatrix,
    q1_mass: CsrMatrix,
    q2_mass: Option<CsrMatrix>,
    state: SimState,
    last_momentum: Option<MomentumSnapshot>,
}

impl Simulation {
    pub fn new(problem: Problem, scheme: Scheme, grid: TimeGrid, settings: StepperSettings) -> Result<Self> {
        settings.solver.validate()?;
        problem.viscosity.validate()?;
        if scheme == Scheme::Fs1 && !problem.is_pure_dirichlet() {
            return Err(Error::Unsupported(format!(
                "the fractional-step scheme needs Dirichlet conditions on both velocity components on every side; `{}` has other conditions",
                problem.name
            )));
        }
        let mesh = problem.mesh.clone();
        let asm = Assembler::new(FeContext::with_default_rule(mesh.clone()));
        let q1 = FunctionSpace::new(mesh.clone(), Degree::Q1);
        let q2 = FunctionSpace::new(mesh, Degree::Q2);
        let q1_mass = asm.mass(&q1, 1.0)?;
        let p_weights = mass_row_sums(&q1_mass);
        let divergence = asm.divergence(&q2, &q1)?;
        let t0 = problem.t0;
        let u = vector_interpolate(&q2, |x, y| (problem.initial_velocity)(x, y, t0));
        let rho = Field::interpolate(&q1, |x, y| (problem.initial_density)(x, y, t0));
        let nu = extrapolated_viscosity(&problem.viscosity, &q1, &[&u], 1, t0)?;
        let mu = dynamic_viscosity(&problem.viscosity, &rho, &nu);
        let state = SimState {
            step: 0,
            t: t0,
            u_prev: None,
            u_hat: None,
            u_hat_nodal: None,
            p: Field::zeros(&q1),
            rho,
            rho_prev: None,
            nu,
            mu,
            mu_prev: None,
            weak_divergence: None,
            u,
        };
        let mut sim = Simulation {
            problem,
            scheme,
            grid,
            settings,
            asm,
            q1,
            q2,
            p_weights,
            saddle: None,
            divergence,
            q1_mass,
            q2_mass: None,
            state,
            last_momentum: None,
        };
        sim.init_pressure()?;
        sim.reset_hat();
        Ok(sim)
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn settings(&self) -> &StepperSettings {
        &self.settings
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn assembler(&self) -> &Assembler {
        &self.asm
    }

    pub fn fe(&self) -> &FeContext {
        self.asm.fe()
    }

    pub fn velocity_space(&self) -> &Arc<FunctionSpace> {
        &self.q2
    }

    pub fn scalar_space(&self) -> &Arc<FunctionSpace> {
        &self.q1
    }

    pub fn divergence_matrix(&self) -> &CsrMatrix {
        &self.divergence
    }

    pub fn pressure_mass(&self) -> &CsrMatrix {
        &self.q1_mass
    }

    pub fn last_momentum(&self) -> Option<&MomentumSnapshot> {
        self.last_momentum.as_ref()
    }

    /// Replaces the initial velocity (before any step is taken).
    pub fn set_initial_velocity(&mut self, u: VectorField) -> Result<()> {
        if self.state.step != 0 {
            return Err(Error::InvalidState("initial velocity can only be set before stepping".into()));
        }
        if !u[0].space().same_mesh(&self.q2) || u[0].space().degree() != Degree::Q2 {
            return Err(Error::invalid("initial velocity must live on the velocity space"));
        }
        self.state.u = u;
        self.state.nu = extrapolated_viscosity(&self.problem.viscosity, &self.q1, &[&self.state.u], 1, self.state.t)?;
        self.state.mu = dynamic_viscosity(&self.problem.viscosity, &self.state.rho, &self.state.nu);
        self.init_pressure()?;
        self.reset_hat();
        Ok(())
    }

    /// Replaces the initial density (before any step is taken).
    pub fn set_initial_density(&mut self, rho: Field) -> Result<()> {
        if self.state.step != 0 {
            return Err(Error::InvalidState("initial density can only be set before stepping".into()));
        }
        if !rho.space().same_mesh(&self.q1) || rho.space().degree() != Degree::Q1 {
            return Err(Error::invalid("initial density must live on the scalar space"));
        }
        self.state.rho = rho;
        self.state.mu = dynamic_viscosity(&self.problem.viscosity, &self.state.rho, &self.state.nu);
        self.init_pressure()?;
        Ok(())
    }

    fn reset_hat(&mut self) {
        if self.scheme == Scheme::Fs1 {
            let fe = self.asm.fe();
            let ux = fe.values(&self.state.u[0]).expect("velocity space");
            let uy = fe.values(&self.state.u[1]).expect("velocity space");
            self.state.u_hat = Some(QpVector(ux.0.iter().zip(&uy.0).map(|(&a, &b)| [a, b]).collect()));
            self.state.u_hat_nodal = Some(self.state.u.clone());
        }
    }

    fn init_pressure(&mut self) -> Result<()> {
        let t0 = self.state.t;
        let mode = match (self.settings.pressure_init, &self.problem.exact_pressure) {
            (PressureInit::Exact, None) => PressureInit::Poisson,
            (m, _) => m,
        };
        let p = match mode {
            PressureInit::Zero => Field::zeros(&self.q1),
            PressureInit::Exact => {
                let exact = self.problem.exact_pressure.as_ref().expect("checked");
                let p = Field::interpolate(&self.q1, |x, y| exact(x, y, t0));
                self.mean_zero(p)
            }
            PressureInit::Poisson => {
                if self.scheme != Scheme::Fs1 {
                    // the coupled schemes never read p_0
                    Field::zeros(&self.q1)
                } else {
                    self.poisson_pressure()?
                }
            }
        };
        self.state.p = p;
        Ok(())
    }

    fn poisson_pressure(&self) -> Result<Field> {
        let fe = self.asm.fe();
        let rho = fe.values(&self.state.rho)?;
        self.asm.check_positive("density", &rho)?;
        let inv_rho = rho.map(|r| 1.0 / r);
        let a = self.asm.diffusion(&self.q1, &inv_rho)?;
        let u = [fe.values(&self.state.u[0])?, fe.values(&self.state.u[1])?];
        let gu = [fe.gradients(&self.state.u[0])?, fe.gradients(&self.state.u[1])?];
        let f = self.forcing_at(self.state.t, &rho);
        let src = QpVector(
            (0..fe.num_points())
                .map(|k| {
                    let w = [u[0].0[k], u[1].0[k]];
                    let conv = |c: usize| w[0] * gu[c].0[k][0] + w[1] * gu[c].0[k][1];
                    [f.0[k][0] / rho.0[k] - conv(0), f.0[k][1] / rho.0[k] - conv(1)]
                })
                .collect(),
        );
        let rhs = self.asm.gradient_load(&self.q1, &src)?;
        let (p, report) = solve_neumann(&a, &rhs, None, &self.p_weights, &self.settings.solver);
        report.require("initial pressure")?;
        Field::from_values(&self.q1, p)
    }

    fn mean_zero(&self, p: Field) -> Field {
        let v = crate::linsolve::project_mean_zero_weighted(p.values(), &self.p_weights);
        Field::from_values(&self.q1, v).expect("same space")
    }

    /// Body force at quadrature points for time `t` and density `rho`.
    fn forcing_at(&self, t: f64, rho: &QpScalar) -> QpVector {
        let fe = self.asm.fe();
        match &self.problem.forcing {
            None => QpVector(vec![[0.0; 2]; fe.num_points()]),
            Some(f) => QpVector(
                fe.points()
                    .into_iter()
                    .zip(&rho.0)
                    .map(|([x, y], &r)| f(x, y, t, r))
                    .collect(),
            ),
        }
    }

    fn density_options(&self, t_next: f64) -> DensityOptions {
        DensityOptions {
            transport: self.settings.density_transport,
            inflow: self.problem.density_dirichlet(&self.q1, t_next),
            solver: self.settings.solver,
        }
    }

    /// Applies the optional clamp and checks the density at quadrature
    /// points is positive.
    fn finish_density(&self, mut rho: Field) -> Result<(Field, QpScalar)> {
        if self.settings.clamp_density {
            let floor = self.problem.properties.rho_floor;
            rho.values_mut().iter_mut().for_each(|r| *r = r.max(floor));
        }
        let rq = self.asm.fe().values(&rho)?;
        self.asm.check_positive("density", &rq)?;
        Ok((rho, rq))
    }

    fn mean_weights(&self) -> Option<Vec<f64>> {
        self.problem.normal_velocity_prescribed().then(|| self.p_weights.clone())
    }

    /// Current monitor values.
    pub fn report(&self) -> Result<EnergyReport> {
        monitor(self.asm.fe(), &self.state, self.grid.tau(), &self.problem.properties)
    }

    /// Advances one step of the configured scheme.
    pub fn step(&mut self) -> Result<EnergyReport> {
        let step = self.state.step + 1;
        let result = match self.scheme {
            Scheme::Bdf1 => self.coupled_step(1),
            Scheme::Bdf2 if self.state.u_prev.is_none() => self.coupled_step(1),
            Scheme::Bdf2 => self.coupled_step(2),
            Scheme::Fs1 => self.fractional_step(),
        };
        result.map_err(|e| e.at_step(step, self.scheme.name()))?;
        self.report()
    }

    /// Runs all steps of the time grid. `observer` sees the initial state
    /// and every subsequent one together with its report.
    pub fn run(
        &mut self,
        mut observer: impl FnMut(&SimState, &EnergyReport) -> Result<()>,
    ) -> Result<Vec<EnergyReport>> {
        let mut reports = Vec::with_capacity(self.grid.steps() + 1);
        let first = self.report()?;
        observer(&self.state, &first)?;
        reports.push(first);
        while self.state.step < self.grid.steps() {
            let r = self.step()?;
            log::debug!(
                "step {} t = {:.6} kinetic = {:.6e} rho ∈ [{:.4}, {:.4}]",
                r.step,
                r.t,
                r.kinetic,
                r.rho_min,
                r.rho_max
            );
            observer(&self.state, &r)?;
            reports.push(r);
        }
        Ok(reports)
    }

    /// Consumes the simulation, returning the final state.
    pub fn into_state(self) -> SimState {
        self.state
    }
}

/// Runs `problem` with `scheme` over `grid`, returning the final state and
/// the report series.
pub fn run(
    problem: Problem,
    scheme: Scheme,
    grid: TimeGrid,
    settings: StepperSettings,
    observer: impl FnMut(&SimState, &EnergyReport) -> Result<()>,
) -> Result<(SimState, Vec<EnergyReport>)> {
    let mut sim = Simulation::new(problem, scheme, grid, settings)?;
    let reports = sim.run(observer)?;
    Ok((sim.into_state(), reports))
}
