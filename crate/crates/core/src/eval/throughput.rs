//! Wall-clock throughput measurement over a corpus.
//!
//! Timing covers decode calls only; corpus loading, model construction, and
//! scoring happen outside the clock. Call counters are accumulated alongside
//! so a measured speedup can be decomposed into fewer-invocations and
//! cheaper-invocation parts.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::decode::{DecodeError, DecodeResult};
use crate::eval::corpus::CorpusPair;

/// Published single-GPU reference points for context in reports. These are
/// external benchmark numbers, not measurements of this implementation.
pub mod reference {
    pub const AR_TOKENS_PER_S: f64 = 88.72;
    pub const SD_TOKENS_PER_S: f64 = 173.43;
    pub const FPOD_TOKENS_PER_S: f64 = 1760.30;
    pub const LONG_RECURSIVE_FPOD_TOKENS_PER_S: f64 = 959.1;
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct ThroughputStats {
    pub emitted_tokens: u64,
    pub elapsed_s: f64,
    pub tokens_per_second: f64,
    pub full_forward_calls: u64,
    pub step_calls: u64,
    pub assistant_step_calls: u64,
    pub passes: u64,
}

impl ThroughputStats {
    /// Speedup of this run's token rate over `baseline`'s.
    pub fn speedup_over(&self, baseline: &ThroughputStats) -> f64 {
        if baseline.tokens_per_second > 0.0 {
            self.tokens_per_second / baseline.tokens_per_second
        } else {
            f64::INFINITY
        }
    }
}

/// Run `decode` over every pair `repetitions` times, timing only the calls.
pub fn measure_throughput<F>(
    mut decode: F,
    corpus: &[CorpusPair],
    repetitions: u32,
) -> Result<ThroughputStats, DecodeError>
where
    F: FnMut(&CorpusPair) -> Result<DecodeResult, DecodeError>,
{
    let repetitions = repetitions.max(1);
    let mut stats = ThroughputStats::default();
    let mut elapsed = Duration::ZERO;
    for _ in 0..repetitions {
        for pair in corpus {
            let start = Instant::now();
            let result = decode(pair)?;
            elapsed += start.elapsed();
            stats.emitted_tokens += result.output.len() as u64;
            stats.full_forward_calls += result.full_forward_calls;
            stats.step_calls += result.step_calls;
            stats.assistant_step_calls += result.assistant_step_calls;
            stats.passes += result.passes;
        }
    }
    stats.elapsed_s = elapsed.as_secs_f64().max(f64::MIN_POSITIVE);
    stats.tokens_per_second = stats.emitted_tokens as f64 / stats.elapsed_s;
    Ok(stats)
}
