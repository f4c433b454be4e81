use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("negative weight {weight} at {context}")]
    NegativeWeight { weight: f64, context: String },
    #[error("non-finite weight at {context}")]
    NonFiniteWeight { context: String },
    #[error("index {index} out of range for size {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("row {row} is not stochastic: {reason}")]
    NotStochastic { row: usize, reason: String },
    #[error("damping factor {0} is outside (0, 1]")]
    InvalidDelta(f64),
    #[error("all weights are zero")]
    AllZeroWeights,
    #[error("total sampling weight is zero")]
    ZeroTotalWeight,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("walk length {total} does not exceed burn-in {burn}")]
    ZeroSteps { total: u64, burn: u64 },
    #[error("recovered middle block has zero mass")]
    ZeroMass,
    #[error("dimension {n} exceeds the dense limit {limit}")]
    DimensionTooLarge { n: usize, limit: usize },
    #[error("linear system is singular (stationary distribution is not unique)")]
    SingularSystem,
    #[error("stationary residual {0:e} exceeds tolerance")]
    ResidualTooLarge(f64),
    #[error("vector is not on the probability simplex: {0}")]
    NotOnSimplex(String),
    #[error("k = {k} must lie in 1..={n}")]
    InvalidK { k: usize, n: usize },
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
