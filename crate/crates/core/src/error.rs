use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sample set is empty")]
    EmptySampleSet,
    #[error("value {0} is not binary (expected 0 or 1)")]
    NonBinaryValue(f64),
    #[error("value {value} lies outside the {support} support")]
    OutsideSupport { value: f64, support: &'static str },
    #[error("sample mean is zero, exponential rate is undefined")]
    ZeroMean,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("integration domain [{lo}, {hi}] is empty")]
    EmptyDomain { lo: f64, hi: f64 },
    #[error("quadrature did not reach tolerance {tol:e} within the iteration cap")]
    QuadratureFailure { tol: f64 },
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("invalid CDF: {0}")]
    InvalidCdf(String),
    #[error("training loss became non-finite at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("at least {needed} posterior rows are required, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("invalid counts: {0}")]
    InvalidCounts(String),
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
