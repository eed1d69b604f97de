//! Kinematic viscosity models and the extrapolated viscosity fields used by
//! the schemes.

use std::fmt;
use std::sync::Arc;

use crate::assembly::{shape_functions, vector_lincomb, Field, VectorField};
use crate::error::{Error, Result};
use crate::mesh::{Degree, FunctionSpace};

/// Regularised Bingham law
/// `ν(γ̇) = ν∞ + (σ₀/ρ∞)(1 − e^{−mγ̇})/γ̇`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bingham {
    pub nu_inf: f64,
    pub sigma0: f64,
    pub m: f64,
    pub rho_inf: f64,
}

impl Bingham {
    pub fn new(nu_inf: f64, sigma0: f64, m: f64, rho_inf: f64) -> Result<Self> {
        if !(nu_inf > 0.0) || !(sigma0 >= 0.0) || !(m > 0.0) || !(rho_inf > 0.0) {
            return Err(Error::invalid(format!(
                "Bingham parameters need ν∞ > 0, σ₀ ≥ 0, m > 0, ρ∞ > 0; got ({nu_inf}, {sigma0}, {m}, {rho_inf})"
            )));
        }
        Ok(Bingham {
            nu_inf,
            sigma0,
            m,
            rho_inf,
        })
    }

    pub fn eval(&self, gamma_dot: f64) -> f64 {
        let x = self.m * gamma_dot;
        // (1 − e^{−x})/γ̇ = m (1 − e^{−x})/x
        let ratio = if x < 1e-8 {
            1.0 - x / 2.0 + x * x / 6.0
        } else {
            -(-x).exp_m1() / x
        };
        self.nu_inf + self.sigma0 / self.rho_inf * self.m * ratio
    }

    /// Value at `γ̇ = 0`.
    pub fn zero_shear(&self) -> f64 {
        self.nu_inf + self.sigma0 * self.m / self.rho_inf
    }
}

type SpaceTimeFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum ViscosityModel {
    /// Constant kinematic viscosity; `μ = ρν`.
    Constant(f64),
    /// Constant dynamic viscosity `μ`, independent of the density.
    ConstantDynamic(f64),
    /// Kinematic viscosity `ν(x, y, t)`.
    Prescribed(SpaceTimeFn),
    Bingham(Bingham),
}

impl fmt::Debug for ViscosityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViscosityModel::Constant(nu) => write!(f, "Constant({nu})"),
            ViscosityModel::ConstantDynamic(mu) => write!(f, "ConstantDynamic({mu})"),
            ViscosityModel::Prescribed(_) => write!(f, "Prescribed(..)"),
            ViscosityModel::Bingham(b) => write!(f, "{b:?}"),
        }
    }
}

impl ViscosityModel {
    pub fn prescribed(f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        ViscosityModel::Prescribed(Arc::new(f))
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ViscosityModel::Constant(v) | ViscosityModel::ConstantDynamic(v) if !(v > 0.0) => {
                Err(Error::invalid(format!("viscosity must be positive, got {v}")))
            }
            ViscosityModel::Bingham(b) => Bingham::new(b.nu_inf, b.sigma0, b.m, b.rho_inf).map(|_| ()),
            _ => Ok(()),
        }
    }

    /// Whether the viscosity depends on the velocity.
    pub fn is_strain_dependent(&self) -> bool {
        matches!(self, ViscosityModel::Bingham(_))
    }
}

/// Kinematic viscosity for a given strain rate. Space-time models need a
/// point and use [`ViscosityModel::Prescribed`] directly; here they are
/// evaluated at the origin.
pub fn eval_viscosity(model: &ViscosityModel, gamma_dot: f64) -> f64 {
    match model {
        ViscosityModel::Constant(nu) => *nu,
        ViscosityModel::ConstantDynamic(mu) => *mu,
        ViscosityModel::Prescribed(f) => f(0.0, 0.0, 0.0),
        ViscosityModel::Bingham(b) => b.eval(gamma_dot),
    }
}

/// `γ̇ = sqrt(2 ∇ˢu:∇ˢu)` from the velocity gradient `g[i][j] = ∂u_i/∂x_j`.
pub fn strain_rate(g: [[f64; 2]; 2]) -> f64 {
    let s01 = 0.5 * (g[0][1] + g[1][0]);
    (2.0 * (g[0][0] * g[0][0] + g[1][1] * g[1][1] + 2.0 * s01 * s01)).sqrt()
}

/// Strain rate of `u` at reference point `xi` of `cell`.
pub fn strain_rate_at(u: &VectorField, cell: usize, xi: [f64; 2]) -> f64 {
    let space = u[0].space();
    strain_rate(local_gradient(u, space, cell, xi))
}

fn local_gradient(u: &VectorField, space: &FunctionSpace, cell: usize, xi: [f64; 2]) -> [[f64; 2]; 2] {
    let degree = space.degree();
    let n = degree.dofs_per_cell();
    let mut v = [0.0; 9];
    let mut gr = [[0.0; 2]; 9];
    shape_functions(degree, xi, &mut v[..n], &mut gr[..n]);
    let mesh = space.mesh();
    let (sx, sy) = (2.0 / mesh.hx(), 2.0 / mesh.hy());
    let dofs = space.cell_dofs(cell);
    let mut g = [[0.0; 2]; 2];
    for c in 0..2 {
        let vals = u[c].values();
        for (k, &d) in dofs.iter().enumerate() {
            g[c][0] += gr[k][0] * sx * vals[d];
            g[c][1] += gr[k][1] * sy * vals[d];
        }
    }
    g
}

/// Strain rate at the mesh vertices, as nodal values of `target` (a Q1
/// space on the same mesh). Each vertex value is the average of the
/// element-wise strain rates of the adjacent cells at that vertex.
pub fn nodal_strain_rate(u: &VectorField, target: &Arc<FunctionSpace>) -> Result<Field> {
    if target.degree() != Degree::Q1 || !target.same_mesh(u[0].space()) {
        return Err(Error::invalid("nodal strain rate needs a Q1 target on the velocity mesh"));
    }
    let mesh = target.mesh();
    let mut sum = vec![0.0; target.num_dofs()];
    let mut count = vec![0u32; target.num_dofs()];
    for cell in 0..mesh.num_cells() {
        let dofs = target.cell_dofs(cell);
        for (k, &(a, b)) in Degree::Q1.local_lattice().iter().enumerate() {
            let xi = [2.0 * a as f64 - 1.0, 2.0 * b as f64 - 1.0];
            sum[dofs[k]] += strain_rate_at(u, cell, xi);
            count[dofs[k]] += 1;
        }
    }
    let vals = sum.iter().zip(&count).map(|(s, &c)| s / c as f64).collect();
    Field::from_values(target, vals)
}

/// Nodal kinematic viscosity at the new time level. For strain-dependent
/// models the velocity is extrapolated (`u_n` for order 1,
/// `2u_n − u_{n−1}` for order 2) and the viscosity is evaluated from its
/// strain rate; the viscosity itself is never extrapolated.
pub fn extrapolated_viscosity(
    model: &ViscosityModel,
    target: &Arc<FunctionSpace>,
    u_hist: &[&VectorField],
    order: usize,
    t_next: f64,
) -> Result<Field> {
    match model {
        ViscosityModel::Constant(nu) => Ok(Field::constant(target, *nu)),
        ViscosityModel::ConstantDynamic(mu) => Ok(Field::constant(target, *mu)),
        ViscosityModel::Prescribed(f) => Ok(Field::interpolate(target, |x, y| f(x, y, t_next))),
        ViscosityModel::Bingham(b) => {
            let u_star = extrapolate_velocity(u_hist, order)?;
            Ok(nodal_strain_rate(&u_star, target)?.map(|g| b.eval(g)))
        }
    }
}

/// `u_n` (order 1) or `2u_n − u_{n−1}` (order 2); `u_hist[0]` is `u_n`.
pub fn extrapolate_velocity(u_hist: &[&VectorField], order: usize) -> Result<VectorField> {
    match (order, u_hist) {
        (1, [un, ..]) => Ok((*un).clone()),
        (2, [un, unm1, ..]) => Ok(vector_lincomb(un, 2.0, unm1, -1.0)),
        (1 | 2, _) => Err(Error::InvalidState(format!(
            "order-{order} extrapolation needs {order} velocity levels, got {}",
            u_hist.len()
        ))),
        _ => Err(Error::invalid(format!("extrapolation order must be 1 or 2, got {order}"))),
    }
}

/// Dynamic viscosity `μ = ρν` nodewise, or the constant `μ` of a
/// [`ViscosityModel::ConstantDynamic`] model.
pub fn dynamic_viscosity(model: &ViscosityModel, rho: &Field, nu: &Field) -> Field {
    match model {
        ViscosityModel::ConstantDynamic(mu) => Field::constant(rho.space(), *mu),
        _ => rho.map_with(nu, |r, n| r * n),
    }
}

impl Field {
    pub(crate) fn map_with(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Field {
        let vals = self.values().iter().zip(other.values()).map(|(&a, &b)| f(a, b)).collect();
        Field::from_values(self.space(), vals).expect("same space")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::vector_interpolate;
    use crate::mesh::{Mesh, Rect};

    fn droplet_bingham() -> Bingham {
        Bingham::new(1e-3, 1.0, 50.0, 100.0).unwrap()
    }

    #[test]
    fn bingham_limits() {
        let b = droplet_bingham();
        assert!((b.eval(0.0) - 0.501).abs() < 1e-15);
        assert!((b.zero_shear() - 0.501).abs() < 1e-15);
        assert!((b.eval(1e12) - 1e-3).abs() < 1e-12);
        let expect = 1e-3 + 0.01 * (1.0 - (-50.0f64).exp());
        assert!((b.eval(1.0) - expect).abs() < 1e-16);
        // series branch joins the closed form
        let x = 1e-8 / 50.0;
        assert!((b.eval(x * 0.999) - b.eval(x * 1.001)).abs() < 1e-10);
    }

    #[test]
    fn bad_parameters() {
        assert!(Bingham::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(Bingham::new(1.0, -1.0, 1.0, 1.0).is_err());
        assert!(ViscosityModel::Constant(-1.0).validate().is_err());
    }

    #[test]
    fn strain_rate_examples() {
        assert_eq!(strain_rate([[0.0; 2]; 2]), 0.0);
        // u = (y, 0)
        assert!((strain_rate([[0.0, 1.0], [0.0, 0.0]]) - 1.0).abs() < 1e-15);
        // u = (x, −y)
        assert!((strain_rate([[1.0, 0.0], [0.0, -1.0]]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn extrapolated_fields() {
        let mesh = Arc::new(Mesh::new(Rect::unit_square(), 3, 2).unwrap());
        let q1 = FunctionSpace::new(mesh.clone(), Degree::Q1);
        let q2 = FunctionSpace::new(mesh, Degree::Q2);
        let zero = crate::assembly::vector_zeros(&q2);
        let model = ViscosityModel::Bingham(droplet_bingham());
        let nu = extrapolated_viscosity(&model, &q1, &[&zero], 1, 0.0).unwrap();
        assert!(nu.values().iter().all(|&v| (v - 0.501).abs() < 1e-15));
        assert!(matches!(
            extrapolated_viscosity(&model, &q1, &[&zero], 2, 0.0),
            Err(Error::InvalidState(_))
        ));
        let u = vector_interpolate(&q2, |x, y| [y * y, x * y]);
        let a = extrapolated_viscosity(&model, &q1, &[&u], 1, 0.0).unwrap();
        let b = extrapolated_viscosity(&model, &q1, &[&u, &u], 2, 0.0).unwrap();
        assert_eq!(a, b);
        let c = extrapolated_viscosity(&ViscosityModel::Constant(0.3), &q1, &[&u], 1, 0.0).unwrap();
        assert!(c.values().iter().all(|&v| v == 0.3));
    }

    #[test]
    fn nodal_strain_rate_of_linear_field_is_exact() {
        let mesh = Arc::new(Mesh::new(Rect::unit_square(), 2, 2).unwrap());
        let q1 = FunctionSpace::new(mesh.clone(), Degree::Q1);
        let q2 = FunctionSpace::new(mesh, Degree::Q2);
        let u = vector_interpolate(&q2, |x, y| [x, -y]);
        let g = nodal_strain_rate(&u, &q1).unwrap();
        assert!(g.values().iter().all(|&v| (v - 2.0).abs() < 1e-13));
    }
}
