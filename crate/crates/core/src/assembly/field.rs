use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::FunctionSpace;

/// Coefficient vector over a scalar function space.
#[derive(Debug, Clone)]
pub struct Field {
    space: Arc<FunctionSpace>,
    values: Vec<f64>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.space.same_mesh(&other.space)
            && self.space.degree() == other.space.degree()
            && self.values == other.values
    }
}

impl Field {
    pub fn zeros(space: &Arc<FunctionSpace>) -> Self {
        Self::constant(space, 0.0)
    }

    pub fn constant(space: &Arc<FunctionSpace>, value: f64) -> Self {
        Field {
            space: space.clone(),
            values: vec![value; space.num_dofs()],
        }
    }

    pub fn from_values(space: &Arc<FunctionSpace>, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.num_dofs() {
            return Err(Error::invalid(format!(
                "field has {} values but the space has {} dofs",
                values.len(),
                space.num_dofs()
            )));
        }
        Ok(Field {
            space: space.clone(),
            values,
        })
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(space: &Arc<FunctionSpace>, f: impl Fn(f64, f64) -> f64) -> Self {
        Field {
            space: space.clone(),
            values: space.dof_coords().iter().map(|p| f(p[0], p[1])).collect(),
        }
    }

    pub fn space(&self) -> &Arc<FunctionSpace> {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Field {
            space: self.space.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `a·self + b·other`.
    pub fn lincomb(&self, a: f64, other: &Field, b: f64) -> Self {
        debug_assert_eq!(self.len(), other.len());
        Field {
            space: self.space.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// A two-component velocity field, one scalar [`Field`] per component.
pub type VectorField = [Field; 2];

/// `a·u + b·v` componentwise.
pub fn vector_lincomb(u: &VectorField, a: f64, v: &VectorField, b: f64) -> VectorField {
    [u[0].lincomb(a, &v[0], b), u[1].lincomb(a, &v[1], b)]
}

pub fn vector_zeros(space: &Arc<FunctionSpace>) -> VectorField {
    [Field::zeros(space), Field::zeros(space)]
}

pub fn vector_interpolate(space: &Arc<FunctionSpace>, f: impl Fn(f64, f64) -> [f64; 2]) -> VectorField {
    [
        Field::interpolate(space, |x, y| f(x, y)[0]),
        Field::interpolate(space, |x, y| f(x, y)[1]),
    ]
}
