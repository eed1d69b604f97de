use std::sync::Arc;

use super::basis::Tabulation;
use super::field::Field;
use super::quadrature::QuadratureRule;
use crate::error::{Error, Result};
use crate::mesh::{Degree, FunctionSpace, Mesh};

/// Default number of Gauss points per axis. Four points integrate the
/// per-axis degree-7 trilinear convection integrand of Q1 density, Q2 wind
/// and Q2 trial/test functions exactly, so the skew-symmetric forms and the
/// discrete energy identities hold to rounding.
pub const DEFAULT_POINTS_PER_AXIS: usize = 4;

/// Scalar values at every quadrature point of a mesh, indexed
/// `cell * points_per_cell + q`.
#[derive(Debug, Clone, PartialEq)]
pub struct QpScalar(pub Vec<f64>);

/// Vector values at every quadrature point of a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct QpVector(pub Vec<[f64; 2]>);

impl QpScalar {
    pub fn map(&self, f: impl Fn(f64) -> f64) -> QpScalar {
        QpScalar(self.0.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &QpScalar, f: impl Fn(f64, f64) -> f64) -> QpScalar {
        QpScalar(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl QpVector {
    pub fn component(&self, c: usize) -> QpScalar {
        QpScalar(self.0.iter().map(|v| v[c]).collect())
    }
}

/// Quadrature rule, tabulated shape functions and geometric data shared by
/// every assembly on one uniform mesh.
#[derive(Debug, Clone)]
pub struct FeContext {
    mesh: Arc<Mesh>,
    rule: QuadratureRule,
    q1: Tabulation,
    q2: Tabulation,
    jxw: Vec<f64>,
}

impl FeContext {
    pub fn new(mesh: Arc<Mesh>, points_per_axis: usize) -> Result<Self> {
        let rule = QuadratureRule::gauss(points_per_axis)?;
        let (hx, hy) = (mesh.hx(), mesh.hy());
        let det = mesh.jacobian_det();
        Ok(FeContext {
            q1: Tabulation::new(Degree::Q1, rule.points(), hx, hy),
            q2: Tabulation::new(Degree::Q2, rule.points(), hx, hy),
            jxw: rule.weights().iter().map(|w| w * det).collect(),
            rule,
            mesh,
        })
    }

    pub fn with_default_rule(mesh: Arc<Mesh>) -> Self {
        Self::new(mesh, DEFAULT_POINTS_PER_AXIS).expect("default rule is valid")
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn tabulation(&self, degree: Degree) -> &Tabulation {
        match degree {
            Degree::Q1 => &self.q1,
            Degree::Q2 => &self.q2,
        }
    }

    pub fn points_per_cell(&self) -> usize {
        self.rule.len()
    }

    pub fn num_points(&self) -> usize {
        self.rule.len() * self.mesh.num_cells()
    }

    /// Quadrature weight times Jacobian determinant at point `q` of any cell.
    #[inline]
    pub fn jxw(&self, q: usize) -> f64 {
        self.jxw[q]
    }

    /// Physical coordinates of point `q` in `cell`.
    pub fn point(&self, cell: usize, q: usize) -> [f64; 2] {
        self.mesh.map_to_physical(cell, self.rule.points()[q])
    }

    /// Physical coordinates of all quadrature points.
    pub fn points(&self) -> Vec<[f64; 2]> {
        let nq = self.points_per_cell();
        (0..self.mesh.num_cells())
            .flat_map(|c| (0..nq).map(move |q| (c, q)))
            .map(|(c, q)| self.point(c, q))
            .collect()
    }

    pub(crate) fn check_space(&self, space: &FunctionSpace) -> Result<()> {
        if !space.same_mesh_as(&self.mesh) {
            return Err(Error::invalid("function space lives on a different mesh"));
        }
        Ok(())
    }

    /// Values of a field at every quadrature point.
    pub fn values(&self, field: &Field) -> Result<QpScalar> {
        self.check_space(field.space())?;
        let tab = self.tabulation(field.space().degree());
        let nq = self.points_per_cell();
        let mut out = Vec::with_capacity(self.num_points());
        let v = field.values();
        for cell in 0..self.mesh.num_cells() {
            let dofs = field.space().cell_dofs(cell);
            for q in 0..nq {
                out.push(tab.values(q).iter().zip(dofs).map(|(n, &d)| n * v[d]).sum());
            }
        }
        Ok(QpScalar(out))
    }

    /// Gradients of a field at every quadrature point (element-wise).
    pub fn gradients(&self, field: &Field) -> Result<QpVector> {
        self.check_space(field.space())?;
        let tab = self.tabulation(field.space().degree());
        let nq = self.points_per_cell();
        let mut out = Vec::with_capacity(self.num_points());
        let v = field.values();
        for cell in 0..self.mesh.num_cells() {
            let dofs = field.space().cell_dofs(cell);
            for q in 0..nq {
                let mut g = [0.0; 2];
                for (dn, &d) in tab.grads(q).iter().zip(dofs) {
                    g[0] += dn[0] * v[d];
                    g[1] += dn[1] * v[d];
                }
                out.push(g);
            }
        }
        Ok(QpVector(out))
    }

    /// Evaluates `f(x, y)` at every quadrature point.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> QpScalar {
        QpScalar(self.points().into_iter().map(|[x, y]| f(x, y)).collect())
    }

    pub fn constant(&self, value: f64) -> QpScalar {
        QpScalar(vec![value; self.num_points()])
    }
}

impl FunctionSpace {
    pub(crate) fn same_mesh_as(&self, mesh: &Arc<Mesh>) -> bool {
        Arc::ptr_eq(self.mesh(), mesh) || **self.mesh() == **mesh
    }
}
