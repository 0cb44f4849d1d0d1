use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Gamma was evaluated at a nonpositive integer.
    #[error("log-gamma pole at z = {0}")]
    Pole(f64),

    #[error("{what} = {value} is outside the valid range {range}")]
    Domain {
        what: &'static str,
        value: f64,
        range: String,
    },

    #[error("{operation} is not supported in dimension n = {n}")]
    Dimension { operation: &'static str, n: u32 },

    #[error("ball masses of radial components can only be taken off-center for boundary dimension <= 3")]
    UnsupportedCenter,

    #[error("quadrature did not converge: estimate {value:e}, error {error:e}, tolerance {tolerance:e}")]
    Quadrature {
        value: f64,
        error: f64,
        tolerance: f64,
    },

    #[error("quadrature produced a non-finite integrand value at x = {0}")]
    NonFinite(f64),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("measure support extends beyond the projection cap of chordal radius {0}")]
    SupportOutsideCap(f64),

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, range: impl Into<String>) -> Self {
        Error::Domain {
            what,
            value,
            range: range.into(),
        }
    }
}
