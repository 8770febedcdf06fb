use thiserror::Error;

/// Errors raised by input validation and the numerical pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} must satisfy {constraint}, got {value}")]
    InvalidParameter {
        name: &'static str,
        constraint: &'static str,
        value: f64,
    },

    #[error("{what}: expected length {expected}, got {actual}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error(
        "exact signal enumeration supports at most {cap} nodes, got {nodes}; use the sampled path"
    )]
    EnumerationCapExceeded { nodes: usize, cap: usize },

    #[error("preventive allocation {allocated} exceeds the total budget {budget}")]
    BudgetExceeded { allocated: f64, budget: f64 },

    #[error("sample count must be at least 1")]
    NoSamples,

    #[error("perfect-sensor cost requires identical valuation, half-saturation and pre-existing defense across nodes")]
    HeterogeneousNodes,

    #[error("objective is non-finite at every start point; no finite optimum exists")]
    NoFiniteOptimum,

    #[error("analytic expected cost is infinite; simulating an infinite mean is meaningless")]
    InfiniteAnalyticCost,

    #[error("baseline cost is zero; improvement is undefined")]
    UndefinedImprovement,
}

pub type Result<T> = std::result::Result<T, Error>;
