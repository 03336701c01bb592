use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("invalid frame for variable '{var}': {reason}")]
    InvalidFrame { var: String, reason: String },

    #[error("empty set of configurations cannot be a focal element")]
    EmptyFocal,

    #[error("masses sum to {sum}, expected 1")]
    MassSum { sum: f64 },

    #[error("negative mass {0}")]
    NegativeMass(f64),

    #[error("expected a {expected} valuation")]
    KindMismatch { expected: &'static str },

    #[error("incomplete or inconsistent table: {0}")]
    IncompleteTable(String),

    #[error("total conflict: the combined belief functions are contradictory")]
    TotalConflict,

    #[error("lambda {0} outside [0, 1]")]
    InvalidLambda(f64),

    #[error("a weighting factor is required to eliminate random variable '{0}'")]
    LambdaRequired(String),

    #[error("unknown variable '{0}'")]
    UnknownVariable(String),

    #[error("unknown value '{value}' for variable '{var}'")]
    UnknownValue { var: String, value: String },

    #[error("duplicate {0}")]
    Duplicate(String),

    #[error("precedence relation has a cycle through '{0}'")]
    Cycle(String),

    #[error("network is not well-defined: {0}")]
    NotWellDefined(String),

    #[error("{0} configurations exceed the enumeration limit of {1}")]
    TooLarge(u128, u128),

    #[error("not a canonical problem: {0}")]
    NotCanonical(String),

    #[error("expected value decreases from {low_value} at lambda {low} to {high_value} at lambda {high}")]
    NonMonotone {
        low: f64,
        low_value: f64,
        high: f64,
        high_value: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),
}
