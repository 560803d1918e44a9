use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum ConvError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("zero representative is not a projective point")]
    ZeroProjectivePoint,

    #[error("normalized value of a homogeneous pair is undefined at x = 0")]
    HomogeneousAtZero,

    #[error("classification window too small: horizon {horizon} < j_min {j_min}")]
    WindowTooSmall { horizon: usize, j_min: usize },

    #[error("term rules emit exponent {exponent} more than once")]
    ExponentCollision { exponent: u64 },

    #[error("sampler exhausted its budget on a degenerate window: {0}")]
    SamplerBudget(String),

    #[error("hyperplane certification failed after shrinking epsilon {attempts} times")]
    CertificationFailure { attempts: usize },

    #[error("no feasible beta: largest probe value {r} too small for block level {m}")]
    NoFeasibleBeta { r: f64, m: f64 },

    #[error("witness precondition failed: {0}")]
    WitnessPrecondition(String),

    #[error("weight grammar cannot certify a bound for {0}")]
    GrammarUncertifiable(String),

    #[error("{0}")]
    InvalidInput(String),

    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),
}

pub type Result<T> = std::result::Result<T, ConvError>;
