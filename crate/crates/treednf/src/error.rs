use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An expression touches more variables than the minimizer is allowed to
    /// expand into a truth table. Exponential blow-up is a hard error, never a
    /// silent fallback.
    #[error("expression uses {count} variables, exceeding the cap of {cap}")]
    VariableCapExceeded { count: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("feature {feature} is split on twice along one root-to-leaf path")]
    RepeatedSplitOnPath { feature: usize },

    #[error("feature index {feature} is outside the declared dimension {dimension}")]
    UnknownFeatureIndex { feature: usize, dimension: usize },

    #[error("dataset has no rows")]
    EmptyDataset,

    #[error("per-original-feature masking requires a dataset group map")]
    MissingGroupMap,

    #[error("empty importance distribution")]
    EmptyDistribution,

    #[error("Blake canonical form has not been attached to this form")]
    BcfMissing,

    #[error("illegal action: feature {feature} is {reason}")]
    IllegalAction { feature: usize, reason: &'static str },

    #[error("policy purchased every tree feature without reaching a terminal state")]
    NonTerminatingPolicy,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
