//! Corpus ingestion, punctuation F1 scoring, throughput measurement, and the
//! improvement-factor analytics.

pub mod analytics;
pub mod corpus;
pub mod harness;
pub mod report;
pub mod score;
pub mod throughput;

pub use analytics::{
    estimate_alpha, estimate_eta, expected_tokens, improvement_factor,
    simulate_expected_tokens, AlphaEstimate, AnalyticParams, AnalyticsError,
};
pub use corpus::{load_corpus, reference_texts, strip_punctuation, CorpusError, CorpusPair, LoadedCorpus, Strictness};
pub use harness::{evaluate, EvalOutcome};
pub use score::{align_and_score, MarkScore, PunctF1Report};
pub use throughput::{measure_throughput, ThroughputStats};
