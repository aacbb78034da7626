use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by model construction, inference and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty reduction")]
    EmptyReduction,

    #[error("shape mismatch: expected {expected}, got {actual}")]
    ShapeMismatch { expected: String, actual: String },

    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("beta must exceed 1 (got {0})")]
    BetaTooSmall(f64),

    #[error("divergent geometric tail (beta = {0})")]
    DivergentTail(f64),

    #[error("hidden state outside legal set for z = {z}")]
    IllegalHiddenState { z: usize },

    #[error("z = {z} out of range 1..={max}")]
    ZOutOfRange { z: usize, max: usize },

    #[error("operation requires variant {expected}, model is {actual}")]
    WrongVariant { expected: &'static str, actual: &'static str },

    #[error("enumeration too large: 2^{dims} visible configurations exceeds budget 2^{budget}")]
    EnumerationTooLarge { dims: usize, budget: usize },

    #[error("empty batch")]
    EmptyBatch,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("AIS diverged: non-finite importance weight in chain {chain}")]
    AisDiverged { chain: usize },

    #[error("value {value} out of range for {what}")]
    OutOfRange { what: &'static str, value: f64 },

    #[error("parse error at byte offset {offset}: {msg}")]
    Parse { offset: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("metadata: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn shape(expected: impl ToString, actual: impl ToString) -> Self {
        Error::ShapeMismatch { expected: expected.to_string(), actual: actual.to_string() }
    }
}
