use std::fmt;
use std::sync::Arc;

use crate::assembly::Dirichlet;
use crate::error::{Error, Result};
use crate::mesh::{FunctionSpace, Mesh, Side};
use crate::rheology::ViscosityModel;

pub type ScalarFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(f64, f64, f64) -> [f64; 2] + Send + Sync>;
/// Body force `f(x, y, t, ρ)`, with `ρ` the discrete density at the point.
pub type ForcingFn = Arc<dyn Fn(f64, f64, f64, f64) -> [f64; 2] + Send + Sync>;

/// Admissible density range and monitor floors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidProperties {
    pub rho_min: f64,
    pub rho_max: f64,
    /// Nodal densities below this trigger a warning (or the clamp).
    pub rho_floor: f64,
    pub mu_min: f64,
}

impl FluidProperties {
    pub fn new(rho_min: f64, rho_max: f64, rho_floor: f64, mu_min: f64) -> Result<Self> {
        if !(0.0 < rho_floor && rho_floor <= rho_min && rho_min <= rho_max) || !(mu_min > 0.0) {
            return Err(Error::invalid(format!(
                "need 0 < floor ≤ ρ_min ≤ ρ_max and μ_min > 0, got floor {rho_floor}, [{rho_min}, {rho_max}], μ_min {mu_min}"
            )));
        }
        Ok(FluidProperties {
            rho_min,
            rho_max,
            rho_floor,
            mu_min,
        })
    }
}

/// Dirichlet condition on one velocity component along one side.
#[derive(Clone)]
pub struct VelocityConstraint {
    pub side: Side,
    pub component: usize,
    pub value: ScalarFn,
}

impl VelocityConstraint {
    pub fn zero(side: Side, component: usize) -> Self {
        VelocityConstraint {
            side,
            component,
            value: Arc::new(|_, _, _| 0.0),
        }
    }
}

/// Density prescribed on the inflow part of the boundary, where the given
/// velocity points into the domain.
#[derive(Clone)]
pub struct DensityInflow {
    pub value: ScalarFn,
    pub velocity: VectorFn,
}

/// Everything a scheme needs to know about a flow problem.
#[derive(Clone)]
pub struct Problem {
    pub name: String,
    pub mesh: Arc<Mesh>,
    pub viscosity: ViscosityModel,
    pub forcing: Option<ForcingFn>,
    pub velocity_bc: Vec<VelocityConstraint>,
    pub density_inflow: Option<DensityInflow>,
    pub initial_velocity: VectorFn,
    pub initial_density: ScalarFn,
    /// Exact pressure, when known; used for the initial pressure.
    pub exact_pressure: Option<ScalarFn>,
    pub properties: FluidProperties,
    pub t0: f64,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("mesh", &(self.mesh.nx(), self.mesh.ny()))
            .field("viscosity", &self.viscosity)
            .field("constraints", &self.velocity_bc.len())
            .field("properties", &self.properties)
            .finish_non_exhaustive()
    }
}

impl Problem {
    /// Velocity Dirichlet data at time `t`. Dofs shared by two sides must
    /// receive the same value from both.
    pub fn velocity_dirichlet(&self, space: &FunctionSpace, t: f64) -> Result<[Dirichlet; 2]> {
        let mut bcs = [Dirichlet::new(), Dirichlet::new()];
        let coords = space.dof_coords();
        for c in &self.velocity_bc {
            if c.component > 1 {
                return Err(Error::invalid(format!("velocity component {} out of range", c.component)));
            }
            for &d in space.side_dofs(c.side) {
                let [x, y] = coords[d];
                bcs[c.component].set(d, (c.value)(x, y, t))?;
            }
        }
        Ok(bcs)
    }

    /// Every velocity component is prescribed on every side.
    pub fn is_pure_dirichlet(&self) -> bool {
        Side::ALL.iter().all(|&s| {
            (0..2).all(|c| self.velocity_bc.iter().any(|b| b.side == s && b.component == c))
        })
    }

    /// The normal velocity is prescribed on every side, so the pressure is
    /// determined only up to a constant.
    pub fn normal_velocity_prescribed(&self) -> bool {
        Side::ALL
            .iter()
            .all(|&s| self.velocity_bc.iter().any(|b| b.side == s && b.component == s.normal_component()))
    }

    /// Density Dirichlet data at time `t` on boundary dofs of `space` with
    /// inflow.
    pub fn density_dirichlet(&self, space: &FunctionSpace, t: f64) -> Dirichlet {
        let mut bc = Dirichlet::new();
        let Some(inflow) = &self.density_inflow else {
            return bc;
        };
        let coords = space.dof_coords();
        for side in Side::ALL {
            let n = side.normal();
            for &d in space.side_dofs(side) {
                let [x, y] = coords[d];
                let w = (inflow.velocity)(x, y, t);
                if w[0] * n[0] + w[1] * n[1] < 0.0 && !bc.contains(d) {
                    bc.set(d, (inflow.value)(x, y, t)).expect("fresh dof");
                }
            }
        }
        bc
    }
}
