//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("incompatible cyclotomic field: {0}")]
    IncompatibleField(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is not invertible: {0}")]
    NotInvertible(String),
    #[error("ill-formed rewrite rule: {0}")]
    IllFormedRule(String),
    #[error("scalars belong to different rings: {0}")]
    RingMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("structural error: {0}")]
    Structure(String),
    #[error("degeneracy: {0}")]
    Degeneracy(String),
    #[error("not in the linear system: {0}")]
    NotInSystem(String),
    #[error("group closure exceeds cap {0}")]
    NotFiniteWithinCap(usize),
    #[error("invalid group action: {0}")]
    InvalidAction(String),
    #[error("needs a ring extension: {0}")]
    NeedsExtension(String),
    #[error("fixed locus is not finite: {0}")]
    NotFinite(String),
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
    #[error("necessary condition violated: {0}")]
    NecessaryCondition(String),
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("bad prime {prime}: {reason}; try {suggestion}")]
    BadPrime {
        prime: u64,
        reason: String,
        suggestion: u64,
    },
    #[error("unknown case: {0}")]
    UnknownCase(String),
}

pub type Result<T> = std::result::Result<T, Error>;
