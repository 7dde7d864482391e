use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(usize),

    #[error("{0} is not a prime power")]
    NotPrimePower(usize),

    #[error("invalid irreducible polynomial over F_{p}: {reason}")]
    InvalidIrreducible { p: usize, reason: String },

    #[error("field elements belong to different field specifications")]
    FieldMismatch,

    #[error("input basis is linearly dependent over the prime field")]
    DegenerateBasis,

    #[error("invalid square: {0}")]
    InvalidSquare(String),

    #[error("square orders differ: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("input must be certified first: {0}")]
    Uncertified(String),

    #[error("squares are not in standard form (first column must read 0..d-1)")]
    NotStandardForm,

    #[error("order {order} exceeds the supported maximum {max} for this operation")]
    OrderTooLarge { order: usize, max: usize },

    #[error("search budget exceeded after {nodes} nodes ({transversals_found} transversals found)")]
    BudgetExceeded { nodes: u64, transversals_found: usize },

    #[error("operators do not commute (max commutator entry {max_commutator:.3e})")]
    NotCommuting { max_commutator: f64 },

    #[error("net has {rows} rows but {expected} are required")]
    IncompleteNet { rows: usize, expected: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("internal consistency failure: {0}")]
    Construction(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
