//! Causal next-token predictors.
//!
//! Every backend is deterministic: greedy argmax with ties broken by the
//! fixed token ordering. `forward_full` returns one prediction per input
//! position (`predictions[j]` is the guess for what follows the prefix
//! `x[..=j]`), and `forward_step` must equal the last element of
//! `forward_full` on the same input.

mod context;
mod ngram;
mod oracle;
mod remote;

pub use context::ContextKey;
pub use ngram::NGramModel;
pub use oracle::OracleModel;
pub use remote::{serve_check, RemoteModel, ServeCheckReport, WireRequest, WireResponse};

use thiserror::Error;

use crate::token::Token;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model queried with an empty sequence")]
    EmptyInput,
    #[error("corpus must contain at least one text")]
    EmptyCorpus,
    #[error("n-gram order must be at least 1, got {0}")]
    InvalidOrder(usize),
    #[error("smoothing constant must be positive, got {0}")]
    InvalidSmoothing(f64),
    #[error("model file {path}: {reason}")]
    InvalidModelFile { path: String, reason: String },
    #[error("remote endpoint {endpoint}: {source}")]
    Transport {
        endpoint: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed response from {endpoint}: {reason}; raw: {raw}")]
    MalformedResponse { endpoint: String, reason: String, raw: String },
    #[error("response length mismatch from {endpoint}: expected {expected} predictions, got {got}")]
    LengthMismatch { endpoint: String, expected: usize, got: usize },
}

/// Predictions aligned to input positions; `predictions[j]` follows `x[..=j]`.
pub type PredictionSeq = Vec<Token>;

/// A deterministic next-token predictor.
///
/// The default `forward_step` recomputes the whole pass, which is what a
/// cache-free causal model costs per invocation; backends only override it
/// when the underlying transport has a genuine single-step operation.
pub trait CausalModel: Send + Sync {
    fn forward_full(&self, tokens: &[Token]) -> Result<PredictionSeq, ModelError>;

    fn forward_step(&self, tokens: &[Token]) -> Result<Token, ModelError> {
        self.forward_full(tokens)?.pop().ok_or(ModelError::EmptyInput)
    }
}

impl<M: CausalModel + ?Sized> CausalModel for &M {
    fn forward_full(&self, tokens: &[Token]) -> Result<PredictionSeq, ModelError> {
        (**self).forward_full(tokens)
    }

    fn forward_step(&self, tokens: &[Token]) -> Result<Token, ModelError> {
        (**self).forward_step(tokens)
    }
}

impl CausalModel for Box<dyn CausalModel> {
    fn forward_full(&self, tokens: &[Token]) -> Result<PredictionSeq, ModelError> {
        (**self).forward_full(tokens)
    }

    fn forward_step(&self, tokens: &[Token]) -> Result<Token, ModelError> {
        (**self).forward_step(tokens)
    }
}
