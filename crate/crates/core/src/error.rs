use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("empty set: {0}")]
    EmptySet(&'static str),

    #[error("no sampled frequencies: the constraint set is empty")]
    EmptyConstraint,

    #[error(
        "solver did not converge after {iterations} iterations \
         (feasibility residual {residual:e}, last step {step:e})"
    )]
    NonConvergence { iterations: usize, residual: f64, step: f64 },

    #[error("instance too large for exhaustive search: N = {n}, limit {limit}")]
    InstanceTooLarge { n: usize, limit: usize },

    #[error("exhaustive search exceeded its budget of {budget} candidate supports")]
    SearchBudgetExceeded { budget: usize },

    #[error("the signal is zero at the given tolerance")]
    ZeroSignal,

    #[error("exhaustive search found no exactly feasible real candidate")]
    NoFeasibleCandidate,

    #[error("Gaussian scale out of range (need 1/r < a < d and a >= 10): {0}")]
    ScaleOutOfRange(String),

    #[error("no keep < {n} makes the truncation heavier than its remainder")]
    CannotSatisfyMassCondition { n: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
