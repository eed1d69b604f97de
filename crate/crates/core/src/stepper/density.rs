use crate::assembly::{Assembler, CsrMatrix, Dirichlet, Field, QpVector, TransportStabilisation, VectorField};
use crate::error::{Error, Result};
use crate::linsolve::{solve_nonsym_from, SolveReport, SolverSettings};

/// Spatial treatment of the density transport equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityTransport {
    Galerkin,
    /// Least-squares stabilisation with weight `δ = τ/θ`.
    LeastSquares,
}

#[derive(Debug, Clone)]
pub struct DensityOptions {
    pub transport: DensityTransport,
    /// Inflow values; empty for enclosed flows.
    pub inflow: Dirichlet,
    pub solver: SolverSettings,
}

impl Default for DensityOptions {
    fn default() -> Self {
        DensityOptions {
            transport: DensityTransport::Galerkin,
            inflow: Dirichlet::new(),
            solver: SolverSettings::default(),
        }
    }
}

fn stabilisation(transport: DensityTransport, tau: f64, theta: f64) -> TransportStabilisation {
    match transport {
        DensityTransport::Galerkin => TransportStabilisation::None,
        DensityTransport::LeastSquares => TransportStabilisation::LeastSquares { delta: tau / theta },
    }
}

fn solve_system(
    (mut a, h): (CsrMatrix, CsrMatrix),
    history: &Field,
    guess: &Field,
    opts: &DensityOptions,
) -> Result<(Field, SolveReport)> {
    let mut rhs = h.mul_vec(history.values());
    opts.inflow.apply(&mut a, &mut rhs, false);
    let (x, report) = solve_nonsym_from(&a, &rhs, Some(guess.values()), &opts.solver);
    let report = report.require("density transport")?;
    Ok((Field::from_values(history.space(), x)?, report))
}

fn solve_transport(
    asm: &Assembler,
    history: &Field,
    guess: &Field,
    wind: &VectorField,
    tau: f64,
    theta: f64,
    opts: &DensityOptions,
) -> Result<(Field, SolveReport)> {
    let stab = stabilisation(opts.transport, tau, theta);
    let system = asm.transport(history.space(), wind, tau, theta, stab)?;
    solve_system(system, history, guess, opts)
}

/// `(ρ_{n+1} − ρ_n)/τ + w·∇ρ_{n+1} + ½(∇·w)ρ_{n+1} = 0`.
pub fn density_step_bdf1(
    asm: &Assembler,
    rho_n: &Field,
    wind: &VectorField,
    tau: f64,
    opts: &DensityOptions,
) -> Result<(Field, SolveReport)> {
    solve_transport(asm, rho_n, rho_n, wind, tau, 1.0, opts)
}

/// `(3ρ_{n+1} − 4ρ_n + ρ_{n−1})/(2τ) + w·∇ρ_{n+1} + ½(∇·w)ρ_{n+1} = 0`,
/// with `w` normally the extrapolated velocity `2u_n − u_{n−1}`.
pub fn density_step_bdf2(
    asm: &Assembler,
    rho_n: &Field,
    rho_prev: &Field,
    wind: &VectorField,
    tau: f64,
    opts: &DensityOptions,
) -> Result<(Field, SolveReport)> {
    if !rho_n.space().same_mesh(rho_prev.space()) {
        return Err(Error::InvalidState("density history lives on different meshes".into()));
    }
    let history = rho_n.lincomb(2.0, rho_prev, -0.5);
    solve_transport(asm, &history, rho_n, wind, tau, 1.5, opts)
}

/// BDF1 step driven by a wind known at quadrature points, such as the
/// end-of-step velocity of the fractional-step scheme; `trace` gives its
/// normal component on the boundary.
pub fn density_step_weak(
    asm: &Assembler,
    rho_n: &Field,
    wind: &QpVector,
    trace: &VectorField,
    tau: f64,
    opts: &DensityOptions,
) -> Result<(Field, SolveReport)> {
    let stab = stabilisation(opts.transport, tau, 1.0);
    let system = asm.transport_weak(rho_n.space(), wind, trace, tau, 1.0, stab)?;
    solve_system(system, rho_n, rho_n, opts)
}
