use thiserror::Error;

/// Errors raised by the numerics and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A series or quadrature failed to reach its accuracy target.
    #[error("accuracy error: {0}")]
    Accuracy(String),
    /// A numerical factorization or reduction failed.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// The requested combination of models is not supported by this operation.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// Time grids of the inputs do not line up.
    #[error("grid mismatch: {0}")]
    Grid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! domain {
    ($($arg:tt)*) => {
        $crate::error::Error::Domain(format!($($arg)*))
    };
}
pub(crate) use domain;
