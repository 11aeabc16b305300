use std::fmt;

/// CLI failure classes mapped onto the exit-code contract: configuration and
/// input problems exit 2, numerical aborts exit 3.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "error: {msg}"),
            CliError::Numeric(msg) => write!(f, "numerical error: {msg}"),
        }
    }
}

impl From<strat_core::Error> for CliError {
    fn from(err: strat_core::Error) -> Self {
        match err {
            strat_core::Error::SolverAbort { .. } => CliError::Numeric(err.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Config(err.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
