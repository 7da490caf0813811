use thiserror::Error;

use crate::group::Elem;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed Cayley table: {0}")]
    MalformedTable(String),

    #[error("invalid parameters: {0}")]
    Parameter(String),

    /// A scan or materialization would exceed a configured limit.
    /// `size` is the size reached (or requested) when the limit tripped.
    #[error("{what}: size {size} exceeds threshold {limit}")]
    Threshold {
        what: &'static str,
        size: u64,
        limit: u64,
    },

    #[error("not a subgroup: {0}")]
    NotSubgroup(String),

    #[error("subgroup is not normal: {0}")]
    NotNormal(String),

    #[error("unsupported backend: {0}")]
    Unsupported(String),

    #[error("cocycle identity fails at ({0}, {1}, {2})")]
    CocycleIdentity(Elem, Elem, Elem),

    #[error("one-cocycle law fails at ({0}, {1})")]
    OneCocycleLaw(Elem, Elem),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid document at {path}: {msg}")]
    Spec { path: String, msg: String },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn spec(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Spec {
            path: path.into(),
            msg: msg.into(),
        }
    }
}
