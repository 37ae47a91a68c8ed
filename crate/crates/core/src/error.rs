//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by ingestion, construction, and analysis.
#[derive(Debug, Error)]
pub enum Error {
    /// A line of the input stream is not valid JSON.
    #[error("line {line}: malformed JSON: {msg}")]
    Parse { line: usize, msg: String },

    /// A record is valid JSON/CSV but violates the input schema.
    #[error("line {line}: {msg}")]
    Schema { line: usize, msg: String },

    /// An explicit edge id occurred twice.
    #[error("line {line}: duplicate edge id {id:?}")]
    DuplicateId { line: usize, id: String },

    /// A timestamp could not be handled for the named edge.
    #[error("edge {edge}: {msg}")]
    Time { edge: usize, msg: String },

    /// A vertex handle outside 0..|V|.
    #[error("unknown vertex id {0}")]
    UnknownVertex(u32),

    /// A parameter outside its documented range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Two distributions passed to a distance do not share a support.
    #[error("mismatched distribution support: {left} vs {right} entries")]
    MismatchedSupport { left: usize, right: usize },

    /// Correlation requested on degenerate data.
    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
