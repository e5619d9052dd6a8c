//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Order bookkeeping violation (no such embedding, mismatched classes).
    #[error("order error: {0}")]
    Order(String),

    /// The operation needs analytic derivative callbacks the symbol lacks.
    #[error("capability error: {0}")]
    Capability(String),

    /// z-bandwidth too large for the grid, or a declared bandwidth is wrong.
    #[error("aliasing error: {0}")]
    Aliasing(String),

    /// Non-finite values produced where finite ones are required.
    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("symbol is not elliptic: margin {margin:.3e} below threshold {threshold:.3e}")]
    NotElliptic { margin: f64, threshold: f64 },

    #[error("ill-conditioned matrix: smallest singular value {sigma_min:.3e}")]
    Conditioning { sigma_min: f64 },

    #[error("limit does not exist: {0}")]
    LimitDoesNotExist(String),

    #[error("contour error: {0}")]
    Contour(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
