use thiserror::Error;

/// Crate-wide error type. Variants are named conditions from the public
/// contracts; corrupt input is reported, never panicked on.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("epidemic died out before any hospitalization")]
    NoOutbreak,

    #[error("node {0} was never infected")]
    NotInfected(crate::NodeId),

    #[error("unknown node id {0}")]
    UnknownNode(crate::NodeId),

    #[error("operation requires a finite network")]
    InfiniteNetwork,

    #[error("parse error in {what} at line {line}: {msg}")]
    Parse {
        what: &'static str,
        line: usize,
        msg: String,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub fn parse(what: &'static str, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            what,
            line,
            msg: msg.into(),
        }
    }
}
