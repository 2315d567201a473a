use thiserror::Error;

use crate::group::GroupTag;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("natural numbers start at 1, got element 0")]
    ZeroElement,

    #[error("duplicate element {0} in finite set")]
    DuplicateElement(u32),

    #[error("Bernoulli parameter must lie in the open interval (0, 1), got {0}")]
    InvalidBernoulliParam(f64),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("group mismatch: {left} vs {right}")]
    GroupMismatch { left: GroupTag, right: GroupTag },

    #[error("element {0} is not in the group")]
    NotInGroup(String),

    #[error("invalid finite system: {0}")]
    InvalidSystem(String),

    #[error("base action is not measure preserving")]
    BaseNotMeasurePreserving,

    #[error("carry chain exceeded {cap} steps past the last digit of {k} (seed {seed})")]
    CarryCap { k: i64, seed: u64, cap: usize },

    #[error("power iteration did not converge in {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("too few samples for a confidence interval: {got} < {min}")]
    TooFewSamples { got: usize, min: usize },

    #[error("{0}")]
    InvalidArgument(String),
}
