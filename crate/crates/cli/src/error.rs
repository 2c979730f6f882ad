use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] gptkit::Error),

    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },

    #[error("{0}")]
    Input(String),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 1 for bad input, 2 for scale limits, 3 for internal numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(gptkit::Error::ScaleLimit(_)) => 2,
            CliError::Core(gptkit::Error::NumericalFailure(_)) => 3,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        use gptkit::Error as E;
        match self {
            CliError::Core(e) => match e {
                E::DimensionMismatch { .. } => "dimension_mismatch",
                E::NumericalFailure(_) => "numerical_failure",
                E::InvalidArgument(_) => "invalid_argument",
                E::NotAState => "not_a_state",
                E::SingularMap => "singular_map",
                E::UnsupportedKind(_) => "unsupported_kind",
                E::ScaleLimit(_) => "scale_limit",
                E::InvalidTable(_) => "invalid_table",
                E::InvalidSetup(_) => "invalid_setup",
                E::EmptySubset => "empty_subset",
                E::WrongSlitCount { .. } => "wrong_slit_count",
                E::InvalidKraus(_) => "invalid_kraus",
                E::NotUnitary => "not_unitary",
                E::TooFewSamples { .. } => "too_few_samples",
            },
            CliError::Read { .. } => "read_error",
            CliError::Write { .. } => "write_error",
            CliError::Input(_) => "invalid_input",
            CliError::Usage(_) => "usage",
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": {
                "kind": self.kind(),
                "message": self.to_string(),
                "exit_code": self.exit_code(),
            }
        })
        .to_string()
    }
}

pub type CliResult<T> = Result<T, CliError>;
