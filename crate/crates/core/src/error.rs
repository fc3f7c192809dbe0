//! Error types shared by the estimator evaluation modules.

use thiserror::Error;

/// Failure to evaluate an estimator on a concrete sample.
///
/// `Undefined` marks per-draw conditions (zero sample proportion, a
/// non-positive exponential denominator, a degenerate sample variance) that
/// occur with positive probability under the design; the Monte Carlo harness
/// counts these rather than propagating non-finite values.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EstimateError {
    #[error("estimate undefined: {0}")]
    Undefined(String),
    #[error("known population parameter `{0}` is required but unset")]
    MissingKnownParam(&'static str),
    #[error("sample statistic `{0}` is required but unset")]
    MissingStatistic(&'static str),
    #[error("estimator requires {required}-phase statistics")]
    PhaseMismatch { required: &'static str },
    #[error("invalid estimator specification: {0}")]
    InvalidSpec(String),
}
