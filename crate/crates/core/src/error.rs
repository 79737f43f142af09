use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole: denominator 1 + t^b vanishes at {0}")]
    Pole(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("branch ambiguity: {0}")]
    BranchAmbiguity(String),

    #[error("orbit of {point} did not settle within {max_iter} iterations")]
    NonConvergence { point: String, max_iter: usize },

    #[error("series truncation failed after {terms} terms at {point}")]
    TruncationFailure { point: String, terms: usize },

    #[error("point {0} could not be classified (near the Julia set)")]
    Undecided(String),

    #[error("inverse-branch iteration for word {0} is not contracting")]
    NonContraction(String),

    #[error("ratio ln(2b)/chi = {0} is within 1e-6 of an integer")]
    NearIntegerResonance(f64),

    #[error("derivative order {0} is not supported (maximum 4)")]
    UnsupportedOrder(usize),

    #[error("size guard: {0}")]
    SizeGuard(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
