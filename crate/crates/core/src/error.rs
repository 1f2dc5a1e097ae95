use thiserror::Error;

use crate::tensor::OperatorKind;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension signature: {0}")]
    InvalidSignature(String),

    #[error("matrix is {rows}x{cols}, signature requires {expected}x{expected}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        expected: usize,
    },

    #[error("signature mismatch: {left:?} vs {right:?}")]
    SignatureMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("subsystem index {index} out of range for {len} factor(s)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("subsystem {index} has dimension {expected}, operator has dimension {found}")]
    FactorDimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("partial trace needs a non-empty keep set")]
    EmptyKeepSet,

    #[error("not a valid {kind} operator: {check} off by {deviation:e} (tolerance {tolerance:e})")]
    KindViolation {
        kind: OperatorKind,
        check: &'static str,
        deviation: f64,
        tolerance: f64,
    },

    #[error("impossible event: probability {0:e} does not exceed the certainty threshold")]
    ImpossibleEvent(f64),

    #[error("probability {0} lies outside [0, 1] beyond tolerance")]
    ProbabilityOutOfRange(f64),

    #[error("event is not implied by the localization projector (deviation {0:e})")]
    NotImplied(f64),

    #[error("amplitudes are not normalized: |alpha|^2 + |beta|^2 = {0}")]
    NotNormalized(f64),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid tolerances: {0}")]
    InvalidTolerance(String),

    #[error("invalid preparator: {0}")]
    InvalidSpec(String),

    #[error("invalid operator record: {0}")]
    InvalidRecord(String),
}

pub type Result<T> = std::result::Result<T, Error>;
