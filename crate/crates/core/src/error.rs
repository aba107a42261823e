use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("attitude quaternion is not unit (|q| = {0})")]
    NonUnitAttitude(f64),
    #[error("input is not a unit dual quaternion (deviation {0:e})")]
    NonUnitInput(f64),
    #[error("{what} too small: got {got}, need at least {min}")]
    TooSmall {
        what: &'static str,
        got: usize,
        min: usize,
    },
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("noise level must be non-negative, got {0}")]
    NegativeSigma(f64),
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("eigenvalue iteration did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("matrix does not have a simple zero eigenvalue: {0}")]
    NotSimpleZero(String),
    #[error("graph has no directed spanning tree")]
    NoSpanningTree,
    #[error("trajectory has no limit configuration")]
    MissingLimit,
    #[error("least-squares system is rank deficient (column {0})")]
    RankDeficient(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
