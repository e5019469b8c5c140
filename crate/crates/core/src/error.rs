//! Error type shared by every analysis stage.

use thiserror::Error;

/// Errors raised by the algebra substrate and the analysis pipeline.
///
/// Negative analysis verdicts (a failed Painlevé test, a violated assumption)
/// are *data*, never errors; this type is reserved for malformed input and
/// broken internal invariants.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KovaError {
    /// Matrix or vector shapes do not conform.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// Syntax error in a system document or expression.
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    /// A name that is not declared in the variable list.
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    /// A right-hand-side monomial whose weighted degree exceeds `p_i + 1`.
    #[error("equation {eq}: monomial {monomial} has weighted degree {actual} > {expected}")]
    AssumptionA1 {
        eq: usize,
        monomial: String,
        expected: i64,
        actual: i64,
    },
    /// Invalid weight data.
    #[error("invalid weights: {0}")]
    Weights(String),
    /// The zero polynomial was passed where a nonzero one is required.
    #[error("zero polynomial has no well-defined roots")]
    ZeroPolynomial,
    /// A documented precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// An internal consistency check failed; indicates a bug, not bad input.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl KovaError {
    /// True for errors caused by user input (CLI exit code 1); false for
    /// internal failures (exit code 2).
    pub fn is_input_error(&self) -> bool {
        !matches!(self, KovaError::Internal(_))
    }
}

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, KovaError>;
