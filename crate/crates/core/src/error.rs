use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Inputs that cannot be combined, e.g. fields on different grids.
    #[error("structural mismatch: {0}")]
    Structure(String),
    /// A parameter or field outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A documented precondition does not hold; the message carries the measured values.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The numerics broke down (non-convergence, blow-up, missing sign change).
    #[error("computation failed: {0}")]
    Computation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::Domain(format!($($arg)*)) };
}

macro_rules! structure {
    ($($arg:tt)*) => { $crate::error::Error::Structure(format!($($arg)*)) };
}

macro_rules! computation {
    ($($arg:tt)*) => { $crate::error::Error::Computation(format!($($arg)*)) };
}

macro_rules! precondition {
    ($($arg:tt)*) => { $crate::error::Error::Precondition(format!($($arg)*)) };
}

pub(crate) use {computation, domain, precondition, structure};
