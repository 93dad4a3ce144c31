use std::io;

use thiserror::Error;

/// Errors raised by the analytics pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("missing or malformed header: expected `{expected}`")]
    Header { expected: String },

    #[error("line {line}: duplicate statement id `{id}`")]
    DuplicateStatement { line: usize, id: String },

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("no subclass-of statement from `{subject}` to `{object}`")]
    MissingSubclassEdge { subject: String, object: String },

    #[error("subclass cycle involving `{class}`: {}", .cycle.join(" -> "))]
    Cycle { class: String, cycle: Vec<String> },

    #[error("{metric} is undefined for `{class}`: {reason}")]
    UndefinedMetric {
        metric: &'static str,
        class: String,
        reason: &'static str,
    },

    #[error("instance mode mismatch: metrics computed in {metrics} mode, filter configured for {filter}")]
    ModeMismatch {
        metrics: &'static str,
        filter: &'static str,
    },

    #[error("not enough eligible pairs for the {bucket} bucket: requested {requested}, available {available} (short by {})", .requested - .available)]
    Shortfall {
        bucket: &'static str,
        requested: usize,
        available: usize,
    },

    #[error("unannotated seed pair `{child}` -> `{parent}`")]
    UnannotatedSeed { child: String, parent: String },

    #[error("invalid quad {index}: {reason}")]
    InvalidQuad { index: usize, reason: String },

    #[error("no scorable quads")]
    NoScorableQuads,

    #[error("cross-validation: {0}")]
    CrossValidation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
