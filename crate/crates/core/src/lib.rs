//! Punctuation restoration by forward-pass-only decoding.
//!
//! The crate turns token-at-a-time generation into verification: the input is
//! copied into the prompt's response region, one forward pass predicts a next
//! token for every position, and punctuation is read off those predictions.
//! Auto-regressive and draft-and-verify speculative decoders are included as
//! baselines, along with sliding-window support for long inputs, an
//! F1/throughput evaluation harness, and the closed-form speedup model with
//! its Monte Carlo cross-check.
//!
//! Model backends are pluggable via [`model::CausalModel`]: a corpus lookup
//! oracle, a smoothed n-gram model, and a client for a remote model server
//! speaking newline-delimited JSON.

pub mod config;
pub mod decode;
pub mod engine;
pub mod eval;
pub mod model;
pub mod prompt;
pub mod token;
pub mod window;

pub use config::Config;
pub use decode::{
    decode_auto_regressive, decode_fpod, decode_recursive_fpod, decode_speculative,
    DecodeError, DecodeResult, RecursionPolicy,
};
pub use engine::{DecoderKind, Engine, EngineError, ModelSpec};
pub use model::{CausalModel, ModelError, NGramModel, OracleModel, RemoteModel};
pub use prompt::{build_fpod_prompt, PromptError, PromptLayout, PromptTemplate};
pub use token::{detokenize, tokenize, PunctuationSet, Token, TokenClass, TokenSeq};
pub use window::{decode_long, plan_windows, Window, WindowSpec};
