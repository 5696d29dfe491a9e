use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its admissible range.
    InvalidParameter(String),
    /// Dataset layout does not match what the operation expects.
    Schema(String),
    /// A column has no spread or too few levels to be usable.
    DegenerateColumn(String),
    /// Not enough observations for the requested fit.
    InsufficientData { needed: usize, got: usize },
    /// The conditioning density is (numerically) zero at the query point.
    NoLocalData { mass: f64 },
    /// Adaptive quadrature hit its subdivision limit.
    NumericalFailure { estimate: f64, error_estimate: f64 },
    /// The conditioning event has probability zero under the model.
    UndefinedConditional,
    /// The requested quantile level is not reached inside the search window.
    QuantileSearch { alpha: f64, supremum: f64 },
    /// A point or matrix has the wrong number of coordinates.
    DimensionMismatch { expected: usize, got: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Schema(msg) => write!(f, "schema error: {msg}"),
            Error::DegenerateColumn(msg) => write!(f, "degenerate column: {msg}"),
            Error::InsufficientData { needed, got } => {
                write!(f, "insufficient data: need at least {needed} rows, got {got}")
            }
            Error::NoLocalData { mass } => {
                write!(f, "no local data: conditioning mass {mass:e} below threshold")
            }
            Error::NumericalFailure {
                estimate,
                error_estimate,
            } => write!(
                f,
                "quadrature did not converge (best estimate {estimate}, error estimate {error_estimate:e})"
            ),
            Error::UndefinedConditional => {
                write!(f, "conditioning event has probability zero")
            }
            Error::QuantileSearch { alpha, supremum } => write!(
                f,
                "quantile level {alpha} not reached in search window (supremum of CDF {supremum})"
            ),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
        }
    }
}

impl core::error::Error for Error {}
