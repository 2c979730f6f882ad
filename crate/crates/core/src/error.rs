use thiserror::Error;

/// Errors raised by the decision procedures and constructors of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not a state of the given space")]
    NotAState,

    #[error("linear map is singular")]
    SingularMap,

    #[error("operation not supported for {0} state spaces")]
    UnsupportedKind(&'static str),

    #[error("scale limit exceeded: {0}")]
    ScaleLimit(String),

    #[error("invalid probability table: {0}")]
    InvalidTable(String),

    #[error("invalid Bell setup: {0}")]
    InvalidSetup(String),

    #[error("slit subset is empty")]
    EmptySubset,

    #[error("expected a {expected}-slit experiment, got {got} slits")]
    WrongSlitCount { expected: usize, got: usize },

    #[error("invalid Kraus operators: {0}")]
    InvalidKraus(String),

    #[error("matrix is not unitary")]
    NotUnitary,

    #[error("too few samples: need at least {min}, got {got}")]
    TooFewSamples { min: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
