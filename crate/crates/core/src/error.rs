use thiserror::Error;

use crate::dsl::{EvalError, ParseError};
use crate::tree::VertexId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("tree would hold {requested} vertices, capacity is {limit}")]
    Capacity { requested: u128, limit: usize },

    #[error("unknown vertex id {0}")]
    UnknownVertex(VertexId),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("weight table covers depth {max_n}, tree needs {needed}")]
    TableTooSmall { max_n: usize, needed: usize },

    #[error("k = {k} exceeds the configured cap {cap}")]
    KTooLarge { k: usize, cap: usize },

    #[error("malformed {what} at line {line}: {msg}")]
    Format {
        what: &'static str,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error("{0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
