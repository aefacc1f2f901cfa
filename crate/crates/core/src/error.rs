use thiserror::Error;

/// Errors raised by the numerical routines and section constructors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid section point: {0}")]
    InvalidPoint(String),

    #[error("mode index {index} out of range (section has {available} modes)")]
    IndexOutOfRange { index: usize, available: usize },

    #[error("{routine} did not converge (estimated error {estimate:.3e})")]
    NonConvergence { routine: &'static str, estimate: f64 },

    #[error("log-value {log_value:.6e} exceeds the representable range")]
    Overflow { log_value: f64 },

    #[error("series truncation not certified after {blocks} blocks (tail bound {tail_bound:.3e})")]
    TruncationFailure { blocks: usize, tail_bound: f64 },

    #[error("integrand at the radial cut is {value:.3e}, above tolerance {tolerance:.3e}")]
    TailTooLarge { value: f64, tolerance: f64 },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:.3e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("spectrum is not strictly positive (lowest eigenvalue {lambda0:.6e})")]
    NonPositiveSpectrum { lambda0: f64 },

    #[error("bad quadrature weights: {0}")]
    BadWeights(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
