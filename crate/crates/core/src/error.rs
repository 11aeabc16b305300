/// Errors raised by construction-time invariant checks and the solvers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dataset must contain at least one sample")]
    EmptyDataset,

    #[error("dual-norm target {target} outside achievable range [{min}, {max}]")]
    TargetOutOfRange { target: f64, min: f64, max: f64 },

    #[error("dual-norm target {target} unreachable, residual {residual:e}")]
    UnreachableTarget { target: f64, residual: f64 },

    #[error("solver aborted at iteration {iteration}: non-finite gradient")]
    SolverAbort { iteration: usize, trace: Vec<f64> },

    #[error("unknown spectrum '{name}', supported: {supported}")]
    UnknownSpectrum { name: String, supported: String },

    #[error("{path}:{line}: {msg}")]
    CsvParse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
