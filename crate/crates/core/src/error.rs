use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),

    #[error("sort mismatch: {0}")]
    SortMismatch(String),

    #[error("variable `{0}` is bound twice on one path")]
    Shadowing(String),

    #[error("invalid letter: {0}")]
    InvalidLetter(String),

    #[error("unassigned free variable `{0}`")]
    Unassigned(String),

    #[error("{what} out of range: {value} (limit {limit})")]
    OutOfRange {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    /// An exhaustive enumeration would exceed a configured guard.
    #[error("resource guard exceeded: {what} is {actual}, guard is {limit}")]
    Resource {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("shape mismatch: {0}")]
    Mismatch(String),

    #[error("formula depth {depth} exceeds theory level {level}")]
    DepthExceedsLevel { depth: usize, level: usize },

    #[error("interpretation: {0}")]
    Interp(String),

    #[error("interpretation does not respect the structure: {0}")]
    NotRespected(String),
}

pub type Result<T> = std::result::Result<T, Error>;
