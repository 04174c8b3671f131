use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An index, scale or position falls outside the tabulated data.
    #[error("range error: {0}")]
    Range(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    /// A hypothesis checked numerically does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("family inconsistency: {0}")]
    FamilyInconsistent(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! domain_err {
    ($($arg:tt)*) => { $crate::error::Error::Domain(format!($($arg)*)) };
}
macro_rules! range_err {
    ($($arg:tt)*) => { $crate::error::Error::Range(format!($($arg)*)) };
}
pub(crate) use {domain_err, range_err};
