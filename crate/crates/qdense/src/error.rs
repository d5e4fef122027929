use thiserror::Error;

/// Errors raised by register construction, gate application and protocol runs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate party label '{0}' in register")]
    DuplicateLabel(String),

    #[error("unknown party label '{0}'")]
    UnknownLabel(String),

    #[error("unsupported subsystem dimension {0} (only 2 and 3)")]
    UnsupportedDim(usize),

    #[error("register must contain at least one party")]
    EmptyRegister,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("registers do not match")]
    RegisterMismatch,

    #[error("amplitude vector has wrong length: expected {expected}, found {found}")]
    BadAmplitudeCount { expected: usize, found: usize },

    #[error("non-finite amplitude at index {0}")]
    NonFiniteAmplitude(usize),

    #[error("cannot normalize a state with zero norm")]
    ZeroNorm,

    #[error("matrix '{matrix}' outside its validity domain: entry {entry} {detail}")]
    DomainViolation {
        matrix: String,
        entry: String,
        detail: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("density matrix is not physical: {0}")]
    NonPhysicalDensity(String),

    #[error("states are identical; unambiguous discrimination is impossible")]
    IdenticalStates,

    #[error("outcome '{outcome}' is not the designated readout for state '{state}'")]
    InvalidOutcome { state: String, outcome: String },

    #[error("state '{0}' does not support a dense-coding run")]
    UnsupportedProtocol(String),

    #[error("unknown figure or table id '{0}'")]
    UnknownFigure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
