use thiserror::Error;

/// Errors raised by the numerical operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A spectrum cannot be synthesized on a grid without aliasing.
    #[error("aliasing: {max_freq} frequencies need more than {n} grid points")]
    Aliasing { max_freq: usize, n: usize },

    /// The requested operation does not support this function variant.
    #[error("unsupported variant: {0}")]
    UnsupportedVariant(String),

    /// The fitting design is numerically degenerate.
    #[error("conditioning error: {0}")]
    Conditioning(String),

    /// Dilates violated the maximum modulus principle beyond tolerance.
    #[error("sup norm decreased from {previous:e} to {current:e} at radius {radius}")]
    MaximumModulus {
        radius: f64,
        previous: f64,
        current: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
