use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config at `{path}`: {message}")]
    ConfigInvalid { path: String, message: String },

    #[error("unknown experiment `{0}`")]
    ExperimentUnknown(String),

    #[error(transparent)]
    Solver(#[from] wavelab_core::Error),

    #[error("i/o: {0}")]
    Io(String),

    #[error("{0} acceptance check(s) failed")]
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigInvalid { .. } | CliError::ExperimentUnknown(_) => 2,
            CliError::Solver(wavelab_core::Error::StabilityViolation { .. }) => 3,
            CliError::Solver(_) => 2,
            CliError::Io(_) => 1,
            CliError::ChecksFailed(_) => 4,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
