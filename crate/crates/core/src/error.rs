use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid group parameter: {0}")]
    InvalidParameter(String),

    #[error("group too large: {what} (limit {limit})")]
    TooLarge { what: String, limit: usize },

    #[error("permutation set is not closed under composition")]
    NotClosed,

    #[error("not a valid permutation of degree {0}")]
    InvalidPermutation(usize),

    #[error("element set is not a subgroup: {0}")]
    NotASubgroup(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("could not draw a free-action vector after {0} attempts; is the action faithful?")]
    NotFree(usize),

    #[error("grid is not closed under the group action")]
    GridNotClosed,

    #[error("conditional pmf row {row} sums to {sum}, expected 1")]
    Unnormalized { row: usize, sum: f64 },

    #[error("sample count {0} below the minimum of 100")]
    TooFewSamples(usize),

    #[error("infeasible bond configuration: {0}")]
    InfeasibleBonds(String),

    #[error("values outside the open interval (0, 1)")]
    ProbabilityOutOfRange,

    #[error("training diverged at epoch {epoch}: loss = {loss}")]
    Diverged { epoch: usize, loss: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
