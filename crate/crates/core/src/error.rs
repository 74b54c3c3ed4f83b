// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("coordinate charts do not match: {0}")]
    ChartMismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix `{0}` is not Hermitian")]
    NotHermitian(String),

    #[error("observables {first} and {second} do not commute (commutator norm {norm:.3e})")]
    NonCommuting { first: usize, second: usize, norm: f64 },

    #[error("Lindblad operator {operator} does not act as a scalar on sector {sector} (residual {residual:.3e})")]
    NonScalarSector { operator: usize, sector: usize, residual: f64 },

    #[error("zero test inconclusive: {0}")]
    Inconclusive(String),

    #[error("numerical evaluation failed: {0}")]
    Evaluation(String),

    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },
}

impl Error {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { key: key.into(), message: message.into() }
    }
}
