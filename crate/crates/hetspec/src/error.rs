//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A physical quantity violated its domain (negative power, zero wavelength, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration is internally inconsistent or cannot be simulated
    /// (aliasing, band outside the simulation window, bad sweep geometry, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Inputs violate an assumption the formula relies on
    /// (asymmetric quadratures, variance below the shot floor, ...).
    #[error("assumption violation: {0}")]
    AssumptionViolation(String),

    /// Two traces that must share sample rate / length / reference do not.
    #[error("trace mismatch: {0}")]
    TraceMismatch(String),

    /// Malformed quantity string ("1550nm", "-64dBm", ...).
    #[error("{0}")]
    UnitParse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn assumption(msg: impl Into<String>) -> Self {
        Error::AssumptionViolation(msg.into())
    }
}
