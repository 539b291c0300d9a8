use thiserror::Error;

/// Failures of the probability-vector and measurement model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("distribution has no outcomes")]
    Empty,
    #[error("weight {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
    #[error("weight {index} is negative ({value})")]
    NegativeWeight { index: usize, value: f64 },
    #[error("weights sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },
    #[error("all weights are zero")]
    AllZero,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("will strength {0} is outside [0, 1]")]
    WillOutOfRange(f64),
    #[error("noise level {0} is outside [0, 1]")]
    NoiseOutOfRange(f64),
    #[error("duplicate outcome label {0:?}")]
    DuplicateLabel(String),
    #[error("entropy gradient diverges at outcome {index} (toward {})", if *.positive { "+inf" } else { "-inf" })]
    DivergentGradient { index: usize, positive: bool },
    #[error("guidance puts weight on outcome {index}, which nature excludes; no diagonal operator can reach it")]
    UnreachableGuidance { index: usize },
    #[error("POVM is incomplete for this state (residual {residual:e})")]
    IncompletePovm { residual: f64 },
    #[error("amplitude state is invalid: {0}")]
    InvalidState(String),
}

/// Failures of the hypothesis-testing layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("fewer than two cells remain after pooling low expected counts")]
    InsufficientExpected,
    #[error("significance level {0} is outside (0, 1)")]
    InvalidAlpha(f64),
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
