use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("diagonal entry {index} = {value} lies outside [-1/2, 1/2]")]
    DiagonalOutOfRange { index: usize, value: f64 },

    #[error("exact computation needs {states} states, budget is {budget}")]
    BudgetExceeded { states: u64, budget: u64 },

    #[error("incomplete dual: expected {expected} irreducible labels, got {got}")]
    IncompleteDual { expected: usize, got: usize },

    #[error("eigensolver did not converge for index {index} after {iterations} iterations")]
    NoConvergence { index: usize, iterations: usize },

    #[error("invalid path from state {start}: {reason}")]
    InvalidPath { start: usize, reason: String },

    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("numerical check failed: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
