use crate::assembly::norms::{weighted_sq, weighted_vector_sq};
use crate::assembly::{FeContext, QpScalar};
use crate::error::{Error, Result};

use super::{FluidProperties, SimState};

/// Per-step record of the quantities appearing in the stability estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub step: usize,
    pub t: f64,
    pub tau: f64,
    /// `‖√ρ_n u_n‖²`
    pub kinetic: f64,
    /// `‖√ρ_n û_n‖²`; equals `kinetic` for the coupled schemes.
    pub kinetic_hat: f64,
    /// `‖√μ_n ∇u_n‖²`
    pub dissipation: f64,
    /// `‖ρ_n^{−1/2} ∇p_n‖²`
    pub pressure_grad: f64,
    /// `‖ρ_n‖²`
    pub density_l2: f64,
    /// `‖ρ_n − ρ_{n−1}‖²`, zero before the first step.
    pub density_jump: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub nu_min: f64,
    pub nu_max: f64,
    /// Nodes with density below the monitor floor.
    pub floor_violations: usize,
    /// Dual norm of the weak divergence of `û`, when checked.
    pub weak_divergence: Option<f64>,
}

impl EnergyReport {
    pub const COLUMNS: [&'static str; 16] = [
        "step",
        "t",
        "tau",
        "kinetic",
        "kinetic_hat",
        "dissipation",
        "pressure_grad",
        "density_l2",
        "density_jump",
        "rho_min",
        "rho_max",
        "nu_min",
        "nu_max",
        "floor_violations",
        "weak_divergence",
        "energy",
    ];

    /// `kinetic + τ·dissipation`, a convenient scalar for plots.
    pub fn energy(&self) -> f64 {
        self.kinetic + self.tau * self.dissipation
    }

    pub fn is_finite(&self) -> bool {
        [
            self.t,
            self.kinetic,
            self.kinetic_hat,
            self.dissipation,
            self.pressure_grad,
            self.density_l2,
            self.density_jump,
            self.rho_min,
            self.rho_max,
            self.nu_min,
            self.nu_max,
        ]
        .iter()
        .all(|v| v.is_finite())
            && self.weak_divergence.is_none_or(f64::is_finite)
    }
}

fn check_finite(state: &SimState) -> Result<()> {
    let fields = [
        ("u_x", &state.u[0]),
        ("u_y", &state.u[1]),
        ("p", &state.p),
        ("rho", &state.rho),
        ("mu", &state.mu),
    ];
    for (name, f) in fields {
        if !f.is_finite() {
            return Err(Error::NonFinite {
                field: name.into(),
                step: state.step,
            });
        }
    }
    Ok(())
}

/// Evaluates the monitored quantities of `state`. Non-finite fields are a
/// fatal error; densities below the floor only produce a warning.
pub fn monitor(fe: &FeContext, state: &SimState, tau: f64, props: &FluidProperties) -> Result<EnergyReport> {
    check_finite(state)?;
    let rho = fe.values(&state.rho)?;
    let mu = fe.values(&state.mu)?;
    let mut kinetic = 0.0;
    let mut dissipation = 0.0;
    for c in 0..2 {
        kinetic += weighted_sq(fe, &rho, &fe.values(&state.u[c])?);
        dissipation += weighted_vector_sq(fe, &mu, &fe.gradients(&state.u[c])?);
    }
    let kinetic_hat = match &state.u_hat {
        Some(uh) => (0..2).map(|c| weighted_sq(fe, &rho, &uh.component(c))).sum(),
        None => kinetic,
    };
    let inv_rho = rho.map(|r| 1.0 / r);
    let pressure_grad = weighted_vector_sq(fe, &inv_rho, &fe.gradients(&state.p)?);
    let density_l2 = weighted_sq(fe, &fe.constant(1.0), &rho);
    let density_jump = match &state.rho_prev {
        Some(prev) => {
            let d = QpScalar(rho.0.iter().zip(fe.values(prev)?.0).map(|(a, b)| a - b).collect());
            weighted_sq(fe, &fe.constant(1.0), &d)
        }
        None => 0.0,
    };
    let floor_violations = state.rho.values().iter().filter(|&&r| r < props.rho_floor).count();
    if floor_violations > 0 {
        log::warn!(
            "step {}: {} nodal densities below the floor {} (min {})",
            state.step,
            floor_violations,
            props.rho_floor,
            state.rho.min()
        );
    }
    let report = EnergyReport {
        step: state.step,
        t: state.t,
        tau,
        kinetic,
        kinetic_hat,
        dissipation,
        pressure_grad,
        density_l2,
        density_jump,
        rho_min: state.rho.min(),
        rho_max: state.rho.max(),
        nu_min: state.nu.min(),
        nu_max: state.nu.max(),
        floor_violations,
        weak_divergence: state.weak_divergence,
    };
    if !report.is_finite() {
        return Err(Error::NonFinite {
            field: "energy report".into(),
            step: state.step,
        });
    }
    Ok(report)
}
