use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("coverage gap: {0}")]
    CoverageGap(String),

    #[error("overlapping conditions: {0}")]
    Overlap(String),

    #[error("point {x} is outside the map domain")]
    OutOfDomain { x: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("malformed set value: {0}")]
    MalformedSet(String),

    #[error("domains of the paired maps differ")]
    DomainMismatch,

    #[error("{0} is only decidable on a finite space")]
    FiniteSpaceOnly(&'static str),

    #[error("{0} requires a singleton-valued multi-map")]
    NotSingleValued(&'static str),

    #[error("no sample pairs with positive left-hand distance")]
    EmptySampleSet,

    #[error("iterate {x} escaped the domain")]
    EscapedDomain { x: f64 },
}
