//! Decoding strategies: auto-regressive, speculative, and forward-pass-only
//! (single-shot and recursive), with uniform cost accounting.

mod autoregressive;
mod fpod;
mod speculative;

pub use autoregressive::decode_auto_regressive;
pub use fpod::{decode_fpod, decode_recursive_fpod};
pub(crate) use fpod::{recursive_fpod_over, AnchoredToken};
pub use speculative::decode_speculative;

use thiserror::Error;

use crate::model::ModelError;
use crate::prompt::PromptError;
use crate::token::TokenSeq;

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
}

/// Output of one decode plus its cost accounting.
///
/// `step_calls` counts main-model single-step invocations,
/// `full_forward_calls` counts whole-sequence passes, and
/// `assistant_step_calls` counts draft-model steps. Throughput numbers are
/// derived from these plus wall-clock time measured by the caller.
#[derive(Debug, Clone, Default)]
pub struct DecodeResult {
    pub output: TokenSeq,
    pub full_forward_calls: u64,
    pub step_calls: u64,
    pub assistant_step_calls: u64,
    pub passes: u64,
    pub inserted_puncts: u64,
    pub deleted_spaces: u64,
}

impl DecodeResult {
    /// Total main-model invocations, the quantity speedups are stated against.
    pub fn main_model_calls(&self) -> u64 {
        self.full_forward_calls + self.step_calls
    }
}

/// Cap and stopping rule for recursive forward-pass decoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecursionPolicy {
    pub max_passes: u64,
    pub stop_on_fixpoint: bool,
}

impl Default for RecursionPolicy {
    fn default() -> Self {
        RecursionPolicy { max_passes: 5, stop_on_fixpoint: true }
    }
}

impl RecursionPolicy {
    pub fn single_pass() -> Self {
        RecursionPolicy { max_passes: 1, stop_on_fixpoint: true }
    }

    pub fn with_max_passes(max_passes: u64) -> Self {
        RecursionPolicy { max_passes: max_passes.max(1), stop_on_fixpoint: true }
    }
}
