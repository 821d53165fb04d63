use thiserror::Error;

use crate::assertions::Witness;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("invalid footprint: {0}")]
    Footprint(String),

    #[error("enumeration cap exceeded: {needed} > {cap}")]
    CapExceeded { needed: u128, cap: u64 },

    #[error("malformed proof node at {path}: {reason}")]
    MalformedNode { path: String, reason: String },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("side condition failed: {msg}")]
    SideCondition { msg: String, witness: Option<Witness> },

    #[error("missing loop annotation: {0}")]
    AnnotationMissing(String),

    #[error("empty quantifier domain")]
    EmptyDomain,

    #[error("{0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
