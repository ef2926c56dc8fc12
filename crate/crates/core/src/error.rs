use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("{routine} did not converge after {iterations} iterations")]
    NonConvergence {
        routine: &'static str,
        iterations: usize,
    },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("degenerate normalizer: phi(|z|^2) = {value:e} is not above {threshold:e}")]
    DegenerateZ { value: f64, threshold: f64 },

    #[error("phi(|z|^2) = {value} is not 1 within {tolerance:e}")]
    UnnormalizedZ { value: f64, tolerance: f64 },

    #[error("parameter {name} must be nonzero")]
    ZeroParameter { name: &'static str },

    #[error("zeta must be nonnegative, got {0}")]
    NegativeZeta(f64),

    #[error("eta must lie in [-1/2, 3/2], got {0}")]
    EtaOutOfRange(f64),

    #[error("{value} (or 1 - {value}) lies outside the mean-function domain [{lo}, {hi}]")]
    XiOutOfDomain { value: f64, lo: f64, hi: f64 },

    #[error("invalid mean function: {0}")]
    InvalidMeanFunction(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resample budget of {0} draws exhausted")]
    ResampleBudget(usize),

    #[error("generator {kind} violated its structural check: {detail}")]
    Generator { kind: String, detail: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("TOML error: {0}")]
    Toml(#[from] toml::de::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
