use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("resource limit exceeded: {what} = {value} exceeds cap {cap}")]
    ResourceLimit {
        what: &'static str,
        value: u128,
        cap: u128,
    },

    #[error("{routine} did not converge after {iterations} iterations")]
    NonConvergence {
        routine: &'static str,
        iterations: usize,
    },

    #[error("{what} = {value} outside the valid open interval ({lo}, {hi})")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("orthogonal supports: the joint support is empty")]
    OrthogonalSupports,

    #[error("support condition violated: {0}")]
    SupportViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
