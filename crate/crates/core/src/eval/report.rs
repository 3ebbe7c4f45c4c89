//! Report rendering: a human-readable table and a machine-readable JSON
//! document.
//!
//! The JSON form is byte-deterministic for a fixed run configuration.
//! Wall-clock fields are therefore opt-in: with `include_timing` off the
//! document contains only counts, scores, and configuration echoes.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::eval::score::{MarkScore, PunctF1Report};
use crate::eval::throughput::{reference, ThroughputStats};

/// Static context block: published single-GPU throughput reference points.
/// These are external numbers quoted for orientation, not measurements.
#[derive(Debug, Clone, Serialize)]
pub struct ReferenceThroughput {
    pub note: &'static str,
    pub ar_tokens_per_s: f64,
    pub sd_tokens_per_s: f64,
    pub fpod_tokens_per_s: f64,
    pub long_recursive_fpod_tokens_per_s: f64,
}

impl Default for ReferenceThroughput {
    fn default() -> Self {
        ReferenceThroughput {
            note: "published reference points, not measured by this run",
            ar_tokens_per_s: reference::AR_TOKENS_PER_S,
            sd_tokens_per_s: reference::SD_TOKENS_PER_S,
            fpod_tokens_per_s: reference::FPOD_TOKENS_PER_S,
            long_recursive_fpod_tokens_per_s: reference::LONG_RECURSIVE_FPOD_TOKENS_PER_S,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterBlock {
    pub emitted_tokens: u64,
    pub full_forward_calls: u64,
    pub step_calls: u64,
    pub assistant_step_calls: u64,
    pub passes: u64,
}

impl From<&ThroughputStats> for CounterBlock {
    fn from(stats: &ThroughputStats) -> Self {
        CounterBlock {
            emitted_tokens: stats.emitted_tokens,
            full_forward_calls: stats.full_forward_calls,
            step_calls: stats.step_calls,
            assistant_step_calls: stats.assistant_step_calls,
            passes: stats.passes,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TimingBlock {
    pub elapsed_s: f64,
    pub tokens_per_second: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub speedup_over_baseline: Option<f64>,
}

/// Corpus acceptance rate and what the closed-form model predicts for it at
/// the configured window length (with a unit efficiency factor).
#[derive(Debug, Clone, Serialize)]
pub struct AnalyticsBlock {
    pub alpha: f64,
    pub punct_tokens: u64,
    pub content_tokens: u64,
    pub window: u32,
    pub expected_tokens_per_pass: f64,
    pub ideal_improvement_factor: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub decoder: String,
    pub model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assistant: Option<String>,
    pub seed: u64,
    pub sentences: usize,
    pub skipped: usize,
    pub marks: BTreeMap<char, MarkScore>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub macro_f1: Option<f64>,
    pub counters: CounterBlock,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytics: Option<AnalyticsBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<TimingBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parallel_timing: Option<TimingBlock>,
    pub reference_throughput: ReferenceThroughput,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Render the aligned per-mark table plus throughput lines.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "decoder {}  model {}  sentences {}  skipped {}\n",
            self.decoder, self.model, self.sentences, self.skipped
        ));
        out.push_str(&format!(
            "{:<6} {:>6} {:>6} {:>6} {:>10} {:>10} {:>10}\n",
            "mark", "tp", "fp", "fn", "precision", "recall", "f1"
        ));
        for (mark, s) in &self.marks {
            out.push_str(&format!(
                "{:<6} {:>6} {:>6} {:>6} {:>10.4} {:>10.4} {:>10.4}\n",
                format!("'{mark}'"),
                s.true_positives,
                s.false_positives,
                s.false_negatives,
                s.precision,
                s.recall,
                s.f1
            ));
        }
        if let Some(macro_f1) = self.macro_f1 {
            out.push_str(&format!("macro-F1 {macro_f1:.4}\n"));
        }
        out.push_str(&format!(
            "calls: full={} step={} assistant={} passes={} emitted={}\n",
            self.counters.full_forward_calls,
            self.counters.step_calls,
            self.counters.assistant_step_calls,
            self.counters.passes,
            self.counters.emitted_tokens
        ));
        if let Some(a) = &self.analytics {
            out.push_str(&format!(
                "corpus acceptance rate {:.4} ({} marks / {} content tokens); E(#token)={:.2} at L={} (ideal IF {:.2})\n",
                a.alpha,
                a.punct_tokens,
                a.content_tokens,
                a.expected_tokens_per_pass,
                a.window,
                a.ideal_improvement_factor
            ));
        }
        if let Some(t) = &self.timing {
            out.push_str(&format!(
                "throughput: {:.1} tokens/s over {:.3}s",
                t.tokens_per_second, t.elapsed_s
            ));
            if let Some(ratio) = t.speedup_over_baseline {
                out.push_str(&format!("  ({ratio:.2}x over baseline)"));
            }
            out.push('\n');
        }
        if let Some(t) = &self.parallel_timing {
            out.push_str(&format!(
                "parallel throughput: {:.1} tokens/s over {:.3}s\n",
                t.tokens_per_second, t.elapsed_s
            ));
        }
        let r = &self.reference_throughput;
        out.push_str(&format!(
            "reference points ({}): ar {:.2}, sd {:.2} ({:.2}x), fpod {:.2} ({:.2}x), long rfpod {:.2} ({:.1}x) tokens/s\n",
            r.note,
            r.ar_tokens_per_s,
            r.sd_tokens_per_s,
            r.sd_tokens_per_s / r.ar_tokens_per_s,
            r.fpod_tokens_per_s,
            r.fpod_tokens_per_s / r.ar_tokens_per_s,
            r.long_recursive_fpod_tokens_per_s,
            r.long_recursive_fpod_tokens_per_s / r.ar_tokens_per_s,
        ));
        out
    }
}

/// Assemble a report from an evaluation outcome.
#[allow(clippy::too_many_arguments)]
pub fn build_report(
    decoder: &str,
    model: &str,
    assistant: Option<&str>,
    seed: u64,
    skipped: usize,
    report: &PunctF1Report,
    sentences: usize,
    throughput: &ThroughputStats,
    parallel: Option<&ThroughputStats>,
    baseline_rate: Option<f64>,
    include_timing: bool,
    analytics: Option<AnalyticsBlock>,
) -> EvalReport {
    let timing = include_timing.then(|| TimingBlock {
        elapsed_s: throughput.elapsed_s,
        tokens_per_second: throughput.tokens_per_second,
        speedup_over_baseline: baseline_rate
            .filter(|r| *r > 0.0)
            .map(|r| throughput.tokens_per_second / r),
    });
    let parallel_timing = match (include_timing, parallel) {
        (true, Some(p)) => Some(TimingBlock {
            elapsed_s: p.elapsed_s,
            tokens_per_second: p.tokens_per_second,
            speedup_over_baseline: None,
        }),
        _ => None,
    };
    EvalReport {
        decoder: decoder.to_string(),
        model: model.to_string(),
        assistant: assistant.map(str::to_string),
        seed,
        sentences,
        skipped,
        marks: report.marks.clone(),
        macro_f1: report.macro_f1(),
        counters: CounterBlock::from(throughput),
        analytics,
        timing,
        parallel_timing,
        reference_throughput: ReferenceThroughput::default(),
    }
}

/// Compute the analytics block for a corpus at a given window length.
pub fn analytics_for_corpus(
    references: &[String],
    puncts: &crate::token::PunctuationSet,
    window: u32,
) -> Option<AnalyticsBlock> {
    let est = crate::eval::analytics::estimate_alpha(references, puncts).ok()?;
    let expected = crate::eval::analytics::expected_tokens(est.alpha, window).ok()?;
    Some(AnalyticsBlock {
        alpha: est.alpha,
        punct_tokens: est.punct_tokens,
        content_tokens: est.content_tokens,
        window,
        expected_tokens_per_pass: expected,
        ideal_improvement_factor: expected,
    })
}
