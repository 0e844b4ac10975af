use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |m - m^†| = {0:e})")]
    NonHermitianInput(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),

    #[error("mesh needs at least {min} directions, got {got}")]
    MeshTooSmall { min: usize, got: usize },

    #[error("mesh allows at most {max} directions, got {got}")]
    MeshTooLarge { max: usize, got: usize },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("measurement directions span a degenerate (planar) hull")]
    DegenerateHull,

    #[error("LP did not converge within {0} iterations")]
    IterationLimit(usize),

    #[error("no steering certificate found")]
    NotFound,

    #[error("animation has no frames")]
    EmptyAnimation,

    #[error("invalid rate or efficiency: {0}")]
    InvalidRate(String),

    #[error("counts table is empty")]
    EmptyCounts,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
