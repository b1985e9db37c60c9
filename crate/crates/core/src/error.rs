use thiserror::Error;

/// Errors raised by model validation, matrix construction and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("model has no shells")]
    EmptyModel,

    #[error(
        "coupling amplitudes are not normalized: sum of c^2 = {sum} (must equal 1 within 1e-12)"
    )]
    Normalization { sum: f64 },

    #[error("invalid shell `{label}`: {reason}")]
    InvalidShell { label: String, reason: String },

    #[error("duplicate shell label `{0}`")]
    DuplicateLabel(String),

    #[error("integer overflow computing {0}")]
    Overflow(&'static str),

    #[error("dimension {dim} exceeds cap {cap}")]
    DimensionCapExceeded { dim: usize, cap: usize },

    #[error("symmetric eigensolver failed to converge (dimension {0})")]
    EigensolveFailure(usize),

    #[error("evaluation point within {distance:.3e} of a pole ({context})")]
    PoleProximity {
        distance: f64,
        context: &'static str,
    },

    #[error("non-physical solution: {0}")]
    NonPhysicalSolution(String),

    #[error("collective-pair product vanishes identically")]
    ZeroState,

    #[error("solver did not converge: {0}")]
    NoConvergence(String),

    #[error("pair number {n} is outside the sector range 0..={capacity}")]
    PairsOutOfRange { n: usize, capacity: usize },

    #[error("sector N={0} is empty")]
    EmptySector(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
