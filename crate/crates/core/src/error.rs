use thiserror::Error;

/// Errors raised by topology construction and metric evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("edge {index}: self-loop on node {node}")]
    SelfLoop { index: usize, node: usize },
    #[error("edge {index}: duplicate edge ({u},{w})")]
    DuplicateEdge { index: usize, u: usize, w: usize },
    #[error("edge {index}: weight {weight} is not strictly positive")]
    NonPositiveWeight { index: usize, weight: f64 },
    #[error("edge {index}: endpoint {node} out of range (v={v})")]
    NodeOutOfRange { index: usize, node: usize, v: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("undefined: {0}")]
    Undefined(String),
    #[error("incompatible: {0}")]
    Incompatible(String),
    #[error("size cap exceeded: {what} is {actual}, cap {cap}")]
    TooLarge {
        what: &'static str,
        actual: usize,
        cap: usize,
    },
    #[error("baseline overload: {0}")]
    BaselineOverload(String),
    #[error("did not converge: {0}")]
    NoConvergence(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("io error: {0}")]
    Io(String),
    #[error("unknown metric key '{0}'")]
    UnknownMetric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn undefined(msg: impl Into<String>) -> Self {
        Error::Undefined(msg.into())
    }

    pub(crate) fn incompatible(msg: impl Into<String>) -> Self {
        Error::Incompatible(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
