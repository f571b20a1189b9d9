use thiserror::Error;

/// Errors raised by the spectral, Hilbert-space and control layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("lambda = {lambda} lies inside the degenerate guard around k^2 = {} (k = {k})", (*k as f64) * (*k as f64))]
    DegenerateBranch { k: u32, lambda: f64 },

    #[error("invalid bracket [{lo}, {hi}] for k = {k}: dispersion has the same sign at both ends")]
    InvalidBracket { k: u32, lo: f64, hi: f64 },

    #[error("lambda = {lambda} is not an eigenvalue of sector k = {k} (boundary residual {residual:e})")]
    NotAnEigenvalue { k: u32, lambda: f64, residual: f64 },

    #[error("eigenvalue lambda = {lambda} of sector k = {k} looks multiple (second singular ratio {ratio:e})")]
    Multiplicity { k: u32, lambda: f64, ratio: f64 },

    #[error(
        "incomplete basis: sector k_max = {k_max} has an eigenvalue {lambda_min} <= Lambda_max = {lambda_max}; raise k_max"
    )]
    IncompleteBasis { k_max: u32, lambda_min: f64, lambda_max: f64 },

    #[error("discretisation oracle failed for k = {k} at shift {shift} after {iterations} iterations")]
    OracleFailure { k: u32, shift: f64, iterations: usize },

    #[error("state/basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("observability defect: equilibrated observation Gramian has min eigenvalue {min_eig:e}")]
    ObservabilityDefect { min_eig: f64, direction: Vec<f64> },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error(transparent)]
    Load(#[from] LoadError),
}

/// Failures while reading a persisted eigenbasis.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed basis file: {0}")]
    Malformed(String),

    #[error("unsupported basis schema version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
