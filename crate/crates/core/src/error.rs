//! Error type shared by every module.

use thiserror::Error;

/// Failures surfaced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("budget exceeded for {what}: estimated cost {cost} > budget {budget}")]
    Budget { what: String, cost: u128, budget: u128 },

    #[error("integer overflow in lattice arithmetic")]
    Overflow,

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("construction error: {0}")]
    Construction(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
