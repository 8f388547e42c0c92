use thiserror::Error;

/// Errors raised by the rotating-frame library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("path needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),

    #[error("path is open: last vertex {last:?} does not return to first vertex {first:?}")]
    OpenPath { first: [f64; 4], last: [f64; 4] },

    #[error("path repeats its first vertex at the end; closure is implicit")]
    DuplicateClosingVertex,

    #[error("path is not planar (out-of-plane deviation {deviation:e})")]
    NonPlanarPath { deviation: f64 },

    #[error("state has {found} components, expected {expected}")]
    ComponentMismatch { expected: usize, found: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("weak-field bound violated at {point:?}: |h| = {norm:.3e} >= 1")]
    WeakFieldViolated { point: [f64; 4], norm: f64 },

    #[error(
        "gauge vector violates the rest-frame restriction d_0 xi^i = 0 at {point:?} \
         (|d_0 xi| = {violation:.3e}); coordinate systems at rest with the apparatus \
         require t^mu proportional to delta^mu_0 on both sides"
    )]
    RestFrameViolation { point: [f64; 4], violation: f64 },

    #[error("metric carries no derivative information; spin connection unavailable")]
    MissingDerivative,

    #[error("numerical instability: {0}")]
    NumericalInstability(String),

    #[error("eigensolver failed to converge")]
    EigenSolve,

    #[error("io error: {0}")]
    Io(String),

    #[error("malformed data: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
