use alloc::string::String;

/// Errors raised by the library operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("generator {generator} cannot act on point {point}")]
    VariantMismatch { generator: String, point: String },
    #[error("word refers to generator g{0}, which does not exist")]
    UnknownGenerator(usize),
    #[error("point {0} appears more than once")]
    RepeatedPoint(String),
    #[error("no listed move links position {0} to position {0}+1")]
    NoMoveFits(usize),
    #[error("set description needs coordinates beyond truncation depth {depth}")]
    TruncationTooShallow { depth: usize },
    #[error("target set is empty")]
    EmptyTarget,
    #[error("closure from {start} exceeded budget {budget}")]
    ClosureBudgetExceeded { start: String, budget: usize },
    #[error("exchange rate fails its axioms: {0}")]
    InvalidRate(String),
    #[error("unsupported set shape: {0}")]
    UnsupportedShape(String),
    #[error("no finite order found for {generator} within {budget} steps")]
    OrderNotFound { generator: String, budget: usize },
    #[error("net schedule is not increasing at stage {0}")]
    NotIncreasing(usize),
    #[error("empty schedule")]
    EmptySchedule,
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("invalid level stack: {0}")]
    InvalidStack(String),
    #[error("algebra with {atoms} atoms exceeds the supported limit of {limit}")]
    AlgebraTooLarge { atoms: usize, limit: usize },
    #[error("point {0} is not in Ω")]
    OutsideSpace(String),
}

pub type Result<T> = core::result::Result<T, Error>;
