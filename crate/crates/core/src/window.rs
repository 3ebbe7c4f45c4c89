//! Sliding-window segmentation with padding for long inputs.
//!
//! Window cores tile the sequence exactly; pads extend each core on both
//! sides (clipped to the sequence) to give the model context. Each window is
//! decoded over its padded slice, but an edit is kept only when its anchor
//! lies inside the window's core, so overlapping pads can never duplicate or
//! drop an edit. Core outputs are concatenated in order.

use crate::decode::{recursive_fpod_over, AnchoredToken, DecodeError, DecodeResult, RecursionPolicy};
use crate::model::CausalModel;
use crate::prompt::PromptTemplate;
use crate::token::{PunctuationSet, TokenSeq};

/// Core length and per-side pad length, in tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    pub core_len: usize,
    pub pad_len: usize,
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec { core_len: 50, pad_len: 10 }
    }
}

impl WindowSpec {
    pub fn new(core_len: usize, pad_len: usize) -> Self {
        WindowSpec { core_len: core_len.max(1), pad_len }
    }
}

/// Half-open core and pad ranges of one window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub core_start: usize,
    pub core_end: usize,
    pub pad_start: usize,
    pub pad_end: usize,
}

/// Partition `[0, seq_len)` into cores of `spec.core_len` and attach clipped
/// pads. An empty sequence yields an empty plan.
pub fn plan_windows(seq_len: usize, spec: &WindowSpec) -> Vec<Window> {
    let mut windows = Vec::new();
    let mut start = 0;
    while start < seq_len {
        let end = (start + spec.core_len).min(seq_len);
        windows.push(Window {
            core_start: start,
            core_end: end,
            pad_start: start.saturating_sub(spec.pad_len),
            pad_end: (end + spec.pad_len).min(seq_len),
        });
        start = end;
    }
    windows
}

/// Decode a long input window by window with (recursive) forward-pass
/// decoding and stitch the core outputs. Counters cover the edits that
/// survive stitching; `passes` and `full_forward_calls` sum over windows.
pub fn decode_long<M: CausalModel>(
    model: &M,
    input: &TokenSeq,
    spec: &WindowSpec,
    template: &PromptTemplate,
    policy: &RecursionPolicy,
    puncts: &PunctuationSet,
) -> Result<DecodeResult, DecodeError> {
    let seq_len = input.len();
    let mut result = DecodeResult::default();
    let mut output = Vec::new();

    for window in plan_windows(seq_len, spec) {
        let slice: Vec<AnchoredToken> = input.tokens()[window.pad_start..window.pad_end]
            .iter()
            .cloned()
            .zip(window.pad_start..)
            .map(|(token, anchor)| AnchoredToken::original(token, anchor))
            .collect();
        let outcome =
            recursive_fpod_over(model, template, slice, puncts, window.pad_end, policy)?;

        result.passes += outcome.passes;
        result.full_forward_calls += outcome.passes;
        result.deleted_spaces += outcome
            .deleted_anchors
            .iter()
            .filter(|&&a| a >= window.core_start && a < window.core_end)
            .count() as u64;

        for token in outcome.tokens {
            let in_core = token.anchor >= window.core_start && token.anchor < window.core_end;
            // A final append is anchored one past the slice; it belongs to
            // the window that owns the end of the sequence.
            let end_append =
                token.inserted && token.anchor == window.pad_end && window.core_end == seq_len;
            if in_core || end_append {
                if token.inserted {
                    result.inserted_puncts += 1;
                }
                output.push(token.token);
            }
        }
    }

    result.output = TokenSeq::new(output);
    Ok(result)
}
