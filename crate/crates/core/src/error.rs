use thiserror::Error;

use crate::hilbert::Subsystem;

/// Errors raised across the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("OAM order must be at least 1, got {0}")]
    InvalidOamOrder(i64),

    #[error("subsystem {0} appears on both sides of a tensor product")]
    LabelCollision(Subsystem),

    #[error("subsystem {0} is not part of the state")]
    UnknownSubsystem(Subsystem),

    #[error("subsystem {subsystem} is expressed in the {found} basis, expected {expected}")]
    BasisMismatch {
        subsystem: Subsystem,
        expected: &'static str,
        found: &'static str,
    },

    #[error("basis {basis} cannot describe subsystem {subsystem}")]
    IncompatibleBasis {
        subsystem: Subsystem,
        basis: &'static str,
    },

    #[error("OAM orders differ: {0} vs {1}")]
    OamOrderMismatch(u32, u32),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("operator is not {kind} (deviation {deviation:e})")]
    InvalidOperator { kind: &'static str, deviation: f64 },

    #[error("not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("all tomography counts are zero")]
    NoCounts,

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
