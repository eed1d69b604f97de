use super::context::{FeContext, QpScalar, QpVector};
use super::field::{Field, VectorField};
use crate::error::Result;

/// `∫ w v²` from quadrature-point values.
pub fn weighted_sq(fe: &FeContext, weight: &QpScalar, values: &QpScalar) -> f64 {
    let nq = fe.points_per_cell();
    weight
        .0
        .iter()
        .zip(&values.0)
        .enumerate()
        .map(|(k, (w, v))| fe.jxw(k % nq) * w * v * v)
        .sum()
}

/// `∫ w |g|²` for vector quadrature values.
pub fn weighted_vector_sq(fe: &FeContext, weight: &QpScalar, values: &QpVector) -> f64 {
    let nq = fe.points_per_cell();
    weight
        .0
        .iter()
        .zip(&values.0)
        .enumerate()
        .map(|(k, (w, g))| fe.jxw(k % nq) * w * (g[0] * g[0] + g[1] * g[1]))
        .sum()
}

pub fn integrate(fe: &FeContext, values: &QpScalar) -> f64 {
    let nq = fe.points_per_cell();
    values.0.iter().enumerate().map(|(k, v)| fe.jxw(k % nq) * v).sum()
}

pub fn l2_norm(fe: &FeContext, field: &Field) -> Result<f64> {
    let v = fe.values(field)?;
    Ok(weighted_sq(fe, &fe.constant(1.0), &v).sqrt())
}

pub fn h1_seminorm(fe: &FeContext, field: &Field) -> Result<f64> {
    let g = fe.gradients(field)?;
    Ok(weighted_vector_sq(fe, &fe.constant(1.0), &g).sqrt())
}

/// `‖field − exact‖` in L2.
pub fn l2_error(fe: &FeContext, field: &Field, exact: impl Fn(f64, f64) -> f64) -> Result<f64> {
    let v = fe.values(field)?;
    let e = fe.sample(exact);
    let diff = v.zip_map(&e, |a, b| a - b);
    Ok(weighted_sq(fe, &fe.constant(1.0), &diff).sqrt())
}

/// L2 error of a vector field, both components combined.
pub fn vector_l2_error(fe: &FeContext, u: &VectorField, exact: impl Fn(f64, f64) -> [f64; 2]) -> Result<f64> {
    let e0 = l2_error(fe, &u[0], |x, y| exact(x, y)[0])?;
    let e1 = l2_error(fe, &u[1], |x, y| exact(x, y)[1])?;
    Ok(e0.hypot(e1))
}

/// L2 error after removing the mean from both the field and the exact
/// function; used for pressures fixed only up to a constant.
pub fn l2_error_mean_free(fe: &FeContext, field: &Field, exact: impl Fn(f64, f64) -> f64) -> Result<f64> {
    let v = fe.values(field)?;
    let e = fe.sample(exact);
    let area = fe.mesh().rect().area();
    let mean_diff = (integrate(fe, &v) - integrate(fe, &e)) / area;
    let diff = v.zip_map(&e, |a, b| a - b - mean_diff);
    Ok(weighted_sq(fe, &fe.constant(1.0), &diff).sqrt())
}
