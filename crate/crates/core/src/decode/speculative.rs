//! All-or-nothing speculative decoding.
//!
//! The assistant drafts a complete candidate auto-regressively; the main
//! model then runs a single verification pass over prompt + candidate. The
//! draft is accepted only if the main model predicts every candidate token at
//! its position *and* agrees with how the draft ended, which is exactly the
//! condition under which the main model's own greedy generation would have
//! produced the same sequence. On any disagreement the whole draft is
//! discarded and the main model regenerates auto-regressively.

use crate::decode::{decode_auto_regressive, DecodeError, DecodeResult};
use crate::model::CausalModel;
use crate::token::{Token, TokenSeq};

pub fn decode_speculative<Main: CausalModel, Draft: CausalModel>(
    main: &Main,
    assistant: &Draft,
    prompt: &TokenSeq,
    max_new_tokens: usize,
) -> Result<DecodeResult, DecodeError> {
    let draft = decode_auto_regressive(assistant, prompt, max_new_tokens)?;
    let assistant_step_calls = draft.step_calls;
    let candidate = draft.output;
    // The draft hit end-of-sequence iff it stopped under budget.
    let draft_hit_eos = candidate.len() < max_new_tokens;

    let mut sequence: Vec<Token> = prompt.tokens().to_vec();
    sequence.extend(candidate.iter().cloned());
    let predictions = main.forward_full(&sequence)?;

    let base = prompt.len();
    let mut verified = candidate
        .iter()
        .enumerate()
        .all(|(j, token)| predictions[base + j - 1] == *token);
    if verified && draft_hit_eos {
        // The main model must also stop here; otherwise its own generation
        // would have continued past the draft.
        verified = sequence.is_empty() || predictions[sequence.len() - 1].is_special();
    }

    if verified {
        return Ok(DecodeResult {
            output: candidate,
            full_forward_calls: 1,
            assistant_step_calls,
            passes: 1,
            ..DecodeResult::default()
        });
    }

    let fallback = decode_auto_regressive(main, prompt, max_new_tokens)?;
    Ok(DecodeResult {
        output: fallback.output,
        full_forward_calls: 1,
        step_calls: fallback.step_calls,
        assistant_step_calls,
        passes: 1,
        ..DecodeResult::default()
    })
}
