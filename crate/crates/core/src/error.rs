use thiserror::Error;

/// Failure modes shared by every module of the library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("accuracy error: {message} (best estimate {estimate:e}, error estimate {error:e})")]
    Accuracy {
        message: String,
        estimate: f64,
        error: f64,
    },

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("membership error: {element} is not in {group}")]
    Membership { element: String, group: String },

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("lemma violation: {0}")]
    LemmaViolation(String),

    #[error("numeric error: {message} (condition number {condition:e})")]
    Numeric { message: String, condition: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
