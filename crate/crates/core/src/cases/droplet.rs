//! Heavy viscoplastic droplet falling through a light fluid onto a layer of
//! the same viscoplastic material.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Rect, Side};
use crate::rheology::{Bingham, ViscosityModel};
use crate::stepper::{FluidProperties, Problem, VelocityConstraint};

/// Geometry defaults are artifact choices; every field can be overridden.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DropletConfig {
    pub rho_droplet: f64,
    pub rho_ambient: f64,
    pub rheology: Bingham,
    pub g: f64,
    pub width: f64,
    pub height: f64,
    pub centre: [f64; 2],
    pub radius: f64,
    pub layer_height: f64,
    /// Width `ℓ` of the tanh interface profile.
    pub smoothing: f64,
}

impl Default for DropletConfig {
    fn default() -> Self {
        DropletConfig {
            rho_droplet: 100.0,
            rho_ambient: 1.0,
            rheology: Bingham {
                nu_inf: 1e-3,
                sigma0: 1.0,
                m: 50.0,
                rho_inf: 100.0,
            },
            g: 1.0,
            width: 1.0,
            height: 4.0,
            centre: [0.5, 2.0],
            radius: 0.25,
            layer_height: 1.0,
            smoothing: 0.02,
        }
    }
}

impl DropletConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = [
            ("rho_droplet", self.rho_droplet),
            ("rho_ambient", self.rho_ambient),
            ("width", self.width),
            ("height", self.height),
            ("radius", self.radius),
            ("smoothing", self.smoothing),
        ];
        for (key, v) in pos {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(key, format!("must be positive, got {v}")));
            }
        }
        if !(self.g >= 0.0) {
            return Err(Error::config("g", format!("must be non-negative, got {}", self.g)));
        }
        if !(0.0 <= self.layer_height && self.layer_height < self.height) {
            return Err(Error::config("layer_height", format!("must lie in [0, height), got {}", self.layer_height)));
        }
        let [cx, cy] = self.centre;
        if !(0.0 < cx && cx < self.width && 0.0 < cy && cy < self.height) {
            return Err(Error::config("centre", format!("({cx}, {cy}) lies outside the domain")));
        }
        Bingham::new(self.rheology.nu_inf, self.rheology.sigma0, self.rheology.m, self.rheology.rho_inf)
            .map_err(|e| Error::config("rheology", e.to_string()))?;
        Ok(())
    }

    pub fn domain(&self) -> Rect {
        Rect {
            x0: 0.0,
            x1: self.width,
            y0: 0.0,
            y1: self.height,
        }
    }

    /// Signed distance to the union of droplet and bottom layer, positive
    /// inside.
    pub fn signed_distance(&self, x: f64, y: f64) -> f64 {
        let [cx, cy] = self.centre;
        let disk = self.radius - (x - cx).hypot(y - cy);
        let layer = self.layer_height - y;
        disk.max(layer)
    }

    pub fn initial_density(&self, x: f64, y: f64) -> f64 {
        let d = self.signed_distance(x, y);
        self.rho_ambient + (self.rho_droplet - self.rho_ambient) * 0.5 * (1.0 + (d / self.smoothing).tanh())
    }

    pub fn problem(&self, nx: usize, ny: usize) -> Result<Problem> {
        self.validate()?;
        let mesh = Arc::new(Mesh::new(self.domain(), nx, ny)?);
        let cfg = *self;
        let g = self.g;
        let velocity_bc = Side::ALL
            .iter()
            .flat_map(|&s| [VelocityConstraint::zero(s, 0), VelocityConstraint::zero(s, 1)])
            .collect();
        let (lo, hi) = (self.rho_ambient.min(self.rho_droplet), self.rho_ambient.max(self.rho_droplet));
        Ok(Problem {
            name: "droplet".into(),
            mesh,
            viscosity: ViscosityModel::Bingham(self.rheology),
            forcing: Some(Arc::new(move |_, _, _, rho| [0.0, -rho * g])),
            velocity_bc,
            density_inflow: None,
            initial_velocity: Arc::new(|_, _, _| [0.0, 0.0]),
            initial_density: Arc::new(move |x, y, _| cfg.initial_density(x, y)),
            exact_pressure: None,
            properties: FluidProperties::new(lo, hi, 0.5 * lo, 0.5 * self.rheology.nu_inf * lo)?,
            t0: 0.0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_profile() {
        let c = DropletConfig::default();
        assert!((c.initial_density(0.5, 2.0) - 100.0).abs() < 1e-8);
        assert!((c.initial_density(0.5, 0.2) - 100.0).abs() < 1e-9);
        assert!((c.initial_density(0.05, 3.0) - 1.0).abs() < 1e-9);
        assert!((c.initial_density(0.5, 2.25) - 50.5).abs() < 1e-12);
        assert!((c.initial_density(0.9, 1.0) - 50.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_geometry() {
        let c = DropletConfig {
            centre: [2.0, 1.0],
            ..DropletConfig::default()
        };
        assert!(c.validate().is_err());
    }
}
