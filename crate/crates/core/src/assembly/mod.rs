//! Quadrature, shape functions, sparse storage and the finite-element
//! operators.

mod basis;
mod context;
mod dirichlet;
mod field;
pub mod norms;
mod operators;
mod quadrature;
mod sparse;

pub use basis::{shape_functions, Tabulation};
pub use context::{FeContext, QpScalar, QpVector, DEFAULT_POINTS_PER_AXIS};
pub use dirichlet::Dirichlet;
pub use field::{vector_interpolate, vector_lincomb, vector_zeros, Field, VectorField};
pub use operators::{Assembler, Coefficient, TransportStabilisation};
pub use quadrature::{gauss_legendre, QuadratureRule};
pub use sparse::{CellPattern, CsrMatrix, Pattern};
