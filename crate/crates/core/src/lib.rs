//! Finite-element solver for variable-density incompressible flow with
//! variable, possibly strain-dependent, viscosity.
//!
//! Velocity is biquadratic, pressure and density are bilinear on a uniform
//! rectangular grid. Three linearised implicit-explicit schemes are
//! provided: coupled BDF1, coupled BDF2 and a first-order fractional step.
//! Each keeps the velocity components decoupled in the viscous operator by
//! writing `∇·(2μ∇ˢu) = ∇·(μ∇u) + ∇ᵀu∇μ` and treating the last term
//! explicitly.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod cases;
pub mod diagnostics;
pub mod error;
pub mod io;
pub mod linsolve;
pub mod mesh;
pub mod rheology;
pub mod stepper;

pub use error::{Error, Result};
