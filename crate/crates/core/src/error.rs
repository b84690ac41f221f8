use thiserror::Error;

use crate::syntax::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("proposition `{0}` is not in the ambient proposition set")]
    UnknownProposition(String),

    #[error("at most {max} propositions are supported, got {got}")]
    TooManyPropositions { got: usize, max: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid fragment spec: {0}")]
    InvalidFragment(String),

    #[error("resource budget exceeded: {what} needs {needed} objects, limit is {limit}")]
    ResourceExhausted {
        what: &'static str,
        needed: String,
        limit: usize,
    },

    #[error("formula `{formula}` is not in fragment {fragment}")]
    NotInFragment { formula: String, fragment: String },

    #[error("unsupported fragment for {op}: {reason}")]
    UnsupportedFragment { op: &'static str, reason: String },

    #[error("polarity violation: {0}")]
    PolarityViolation(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("witnesses cannot be composed: {0}")]
    Compose(String),

    #[error("membership answers are inconsistent with every candidate formula")]
    OracleInconsistent,

    #[error("oracle protocol error: {0}")]
    Protocol(String),

    #[error("construction rejected by its self-check: {0}")]
    ConstructionRejected(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn exhausted(what: &'static str, needed: impl ToString, limit: usize) -> Self {
        Error::ResourceExhausted {
            what,
            needed: needed.to_string(),
            limit,
        }
    }
}
