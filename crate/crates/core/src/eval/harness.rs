//! End-to-end evaluation: decode every corpus pair, score the hypotheses,
//! and measure throughput.

use rayon::prelude::*;

use crate::engine::{DecoderKind, Engine, EngineError};
use crate::eval::corpus::CorpusPair;
use crate::eval::score::{align_and_score, PunctF1Report};
use crate::eval::throughput::{measure_throughput, ThroughputStats};
use crate::model::CausalModel;
use crate::token::tokenize;

#[derive(Debug)]
pub struct EvalOutcome {
    /// Counts aggregated over the whole corpus.
    pub report: PunctF1Report,
    /// One report per pair, in corpus order.
    pub per_sentence: Vec<PunctF1Report>,
    /// Restored text per pair, in corpus order.
    pub hypotheses: Vec<String>,
    /// Sequential timing; the headline tokens/s figure.
    pub throughput: ThroughputStats,
    /// Wall-clock timing with pairs decoded in parallel, when requested.
    /// Reported separately so the sequential rate stays comparable.
    pub parallel_throughput: Option<ThroughputStats>,
}

/// Decode, time, and score `pairs` with the engine's configured decoder.
pub fn evaluate(
    engine: &Engine,
    assistant: Option<&dyn CausalModel>,
    kind: DecoderKind,
    pairs: &[CorpusPair],
    repetitions: u32,
    parallel: bool,
) -> Result<EvalOutcome, EngineError> {
    // Sequential timed run; hypotheses come from the first repetition.
    let mut hypotheses: Vec<String> = Vec::with_capacity(pairs.len());
    let throughput = measure_throughput(
        |pair| {
            let input = tokenize(&pair.plain, &engine.puncts);
            let result = engine
                .decode_tokens(kind, assistant, &input)
                .map_err(engine_to_decode)?;
            if hypotheses.len() < pairs.len() {
                hypotheses.push(result.output.text());
            }
            Ok(result)
        },
        pairs,
        repetitions,
    )?;

    let parallel_throughput = if parallel {
        let start = std::time::Instant::now();
        let emitted: Result<Vec<u64>, EngineError> = pairs
            .par_iter()
            .map(|pair| {
                let input = tokenize(&pair.plain, &engine.puncts);
                Ok(engine.decode_tokens(kind, assistant, &input)?.output.len() as u64)
            })
            .collect();
        let elapsed = start.elapsed().as_secs_f64().max(f64::MIN_POSITIVE);
        let emitted: u64 = emitted?.iter().sum();
        Some(ThroughputStats {
            emitted_tokens: emitted,
            elapsed_s: elapsed,
            tokens_per_second: emitted as f64 / elapsed,
            ..ThroughputStats::default()
        })
    } else {
        None
    };

    let score_one = |(pair, hyp): (&CorpusPair, &String)| {
        align_and_score(&pair.reference, hyp, &engine.puncts)
    };
    let per_sentence: Vec<PunctF1Report> = if parallel {
        pairs.par_iter().zip(hypotheses.par_iter()).map(score_one).collect()
    } else {
        pairs.iter().zip(hypotheses.iter()).map(score_one).collect()
    };

    let mut report = PunctF1Report::default();
    for sentence in &per_sentence {
        report.absorb(sentence);
    }

    Ok(EvalOutcome { report, per_sentence, hypotheses, throughput, parallel_throughput })
}

fn engine_to_decode(err: EngineError) -> crate::decode::DecodeError {
    match err {
        EngineError::Decode(e) => e,
        EngineError::Model(e) => e.into(),
        // Construction errors cannot arise mid-decode.
        other => panic!("unexpected engine error during decode: {other}"),
    }
}
