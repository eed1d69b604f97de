//! Rayleigh–Taylor instability of two fluids with constant kinematic
//! viscosity, in units of `a`, `ρ₁` and `√(a g)`.

use std::sync::Arc;

use crate::assembly::Field;
use crate::error::{Error, Result};
use crate::mesh::{Mesh, Rect, Side};
use crate::rheology::ViscosityModel;
use crate::stepper::{FluidProperties, Problem, VelocityConstraint};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayleighTaylorConfig {
    /// Length scale, the wavelength of the perturbation.
    pub a: f64,
    pub g: f64,
    pub reynolds: f64,
    pub atwood: f64,
    /// Density of the light (lower) fluid.
    pub rho1: f64,
    /// Slope of the initial tanh profile, in units of `1/a`.
    pub sharpness: f64,
    /// Amplitude of the cosine perturbation inside the tanh.
    pub perturbation: f64,
}

impl Default for RayleighTaylorConfig {
    fn default() -> Self {
        RayleighTaylorConfig {
            a: 1.0,
            g: 1.0,
            reynolds: 1000.0,
            atwood: 0.5,
            rho1: 1.0,
            sharpness: 100.0,
            perturbation: 10.0,
        }
    }
}

impl RayleighTaylorConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = [("a", self.a), ("g", self.g), ("reynolds", self.reynolds), ("rho1", self.rho1)];
        for (key, v) in pos {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(key, format!("must be positive, got {v}")));
            }
        }
        if !(0.0 < self.atwood && self.atwood < 1.0) {
            return Err(Error::config("atwood", format!("must lie in (0, 1), got {}", self.atwood)));
        }
        Ok(())
    }

    /// Density of the heavy (upper) fluid, `ρ₁(1 + At)/(1 − At)`.
    pub fn rho2(&self) -> f64 {
        self.rho1 * (1.0 + self.atwood) / (1.0 - self.atwood)
    }

    /// `ν = a√(ag)/Re`.
    pub fn nu(&self) -> f64 {
        self.a * (self.a * self.g).sqrt() / self.reynolds
    }

    /// Level of the interface contour, `(ρ₁ + ρ₂)/2`.
    pub fn mid_density(&self) -> f64 {
        0.5 * (self.rho1 + self.rho2())
    }

    /// `(0, a/2) × (−2a, 2a)`.
    pub fn domain(&self) -> Rect {
        Rect {
            x0: 0.0,
            x1: 0.5 * self.a,
            y0: -2.0 * self.a,
            y1: 2.0 * self.a,
        }
    }

    pub fn initial_density(&self, x: f64, y: f64) -> f64 {
        let (r1, r2) = (self.rho1, self.rho2());
        let arg = self.sharpness * y / self.a + self.perturbation * (2.0 * std::f64::consts::PI * x / self.a).cos();
        0.5 * (r1 + r2) + 0.5 * (r2 - r1) * arg.tanh()
    }

    /// No-slip on the top and bottom walls, zero normal velocity on the
    /// sides.
    pub fn boundary_conditions() -> Vec<VelocityConstraint> {
        vec![
            VelocityConstraint::zero(Side::Bottom, 0),
            VelocityConstraint::zero(Side::Bottom, 1),
            VelocityConstraint::zero(Side::Top, 0),
            VelocityConstraint::zero(Side::Top, 1),
            VelocityConstraint::zero(Side::Left, 0),
            VelocityConstraint::zero(Side::Right, 0),
        ]
    }

    pub fn problem(&self, nx: usize, ny: usize) -> Result<Problem> {
        self.validate()?;
        let mesh = Arc::new(Mesh::new(self.domain(), nx, ny)?);
        let cfg = *self;
        let g = self.g;
        Ok(Problem {
            name: "rayleigh-taylor".into(),
            mesh,
            viscosity: ViscosityModel::Constant(self.nu()),
            forcing: Some(Arc::new(move |_, _, _, rho| [0.0, -rho * g])),
            velocity_bc: Self::boundary_conditions(),
            density_inflow: None,
            initial_velocity: Arc::new(|_, _, _| [0.0, 0.0]),
            initial_density: Arc::new(move |x, y, _| cfg.initial_density(x, y)),
            exact_pressure: None,
            properties: FluidProperties::new(self.rho1, self.rho2(), 0.5 * self.rho1, 0.5 * self.nu() * self.rho1)?,
            t0: 0.0,
        })
    }

    /// Height, in units of `a`, of the interface on the right wall.
    pub fn bubble_height(&self, rho: &Field) -> BubbleHeight {
        let space = rho.space();
        let coords = space.dof_coords();
        let mut wall: Vec<(f64, f64)> = space
            .side_dofs(Side::Right)
            .iter()
            .map(|&d| (coords[d][1], rho.values()[d]))
            .collect();
        wall.sort_by(|a, b| a.0.total_cmp(&b.0));
        let ys: Vec<f64> = wall.iter().map(|w| w.0).collect();
        let vals: Vec<f64> = wall.iter().map(|w| w.1).collect();
        match topmost_crossing(&ys, &vals, self.mid_density()) {
            Some(y) => BubbleHeight {
                height: y / self.a,
                crossed: true,
            },
            None => {
                log::warn!("no interface crossing on the right wall; reporting the domain top");
                BubbleHeight {
                    height: space.mesh().rect().y1 / self.a,
                    crossed: false,
                }
            }
        }
    }
}

/// Interface height on the right wall. Without a crossing `height` is the
/// top of the domain and `crossed` is false.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BubbleHeight {
    pub height: f64,
    pub crossed: bool,
}

/// Topmost point where the piecewise-linear profile through `(ys, vals)`
/// reaches `level`. `ys` must be increasing.
pub fn topmost_crossing(ys: &[f64], vals: &[f64], level: f64) -> Option<f64> {
    assert_eq!(ys.len(), vals.len());
    (1..ys.len()).rev().find_map(|i| {
        let (v0, v1) = (vals[i - 1] - level, vals[i] - level);
        if v1 == 0.0 {
            Some(ys[i])
        } else if v0 == 0.0 {
            Some(ys[i - 1])
        } else if (v0 < 0.0) != (v1 < 0.0) {
            let s = v0 / (v0 - v1);
            Some(ys[i - 1] + s * (ys[i] - ys[i - 1]))
        } else {
            None
        }
    })
}
