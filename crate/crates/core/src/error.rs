use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// The caller violated a precondition (mismatched sizes, bad orders, ...).
    #[error("usage error: {0}")]
    Usage(String),
    /// The truncation or quadrature cannot resolve the requested quantity
    /// to the required tolerance.
    #[error("precision error: {0}")]
    Precision(String),
    /// A symbol or integrand produced a non-finite value.
    #[error("evaluation error: {0}")]
    Evaluation(String),
    #[error("parse error in field `{field}`: {message}")]
    Parse { field: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precision(msg: impl Into<String>) -> Self {
        Error::Precision(msg.into())
    }
}
