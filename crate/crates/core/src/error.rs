use std::path::PathBuf;

use crate::linsolve::SolveReport;

/// Errors produced by mesh construction, assembly, solves and time stepping.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A coefficient violated a positivity precondition at a quadrature point.
    #[error("precondition violated: {what} = {value:e} at element {element}, point ({x}, {y})")]
    Precondition {
        what: &'static str,
        value: f64,
        element: usize,
        x: f64,
        y: f64,
    },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("config error for key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("linear solve `{stage}` did not converge: {report}")]
    NotConverged { stage: String, report: SolveReport },

    #[error("singular factorisation in `{stage}`: {detail}")]
    Singular { stage: String, detail: String },

    #[error("non-finite value in `{field}` at step {step}")]
    NonFinite { field: String, step: usize },

    #[error("step {step} failed in `{stage}`: {source}")]
    Step {
        step: usize,
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn at_step(self, step: usize, stage: &'static str) -> Self {
        match self {
            e @ Error::Step { .. } => e,
            e => Error::Step {
                step,
                stage,
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
