//! Forward-pass-only decoding.
//!
//! The input is copied into the response region of the prompt, one forward
//! pass yields a next-token prediction for every position, and the response
//! is re-emitted with annotations read off those predictions:
//!
//! * a Digit predicted where the response holds a Space deletes that space
//!   (digit runs re-join);
//! * a predicted mark from the punctuation set is inserted before the current
//!   token, or appended after the final one;
//! * anything else re-emits the response token unchanged.
//!
//! Generation thereby becomes verification: one full pass replaces one model
//! invocation per produced token.
//!
//! Because a prediction only sees the original, unannotated history, marks
//! whose evidence depends on earlier marks surface only on a later pass.
//! [`decode_recursive_fpod`] reruns the pass on its own output until a pass
//! changes nothing or a cap is reached.
//!
//! Insertion is suppressed when it would land adjacent (modulo spaces) to an
//! existing mark — either the previous emitted non-Space token or the current
//! response token is already punctuation. Without that rule a pass over an
//! already-annotated response would double its marks and recursion could grow
//! text without bound; with it, re-decoding annotated text is a no-op.

use crate::decode::{DecodeError, DecodeResult, RecursionPolicy};
use crate::model::CausalModel;
use crate::prompt::{PromptLayout, PromptTemplate};
use crate::token::{PunctuationSet, Token, TokenSeq};

/// A response token carrying the index it is anchored to.
///
/// Surviving originals keep their position in the pre-decode sequence;
/// inserted marks anchor to the token they precede (or one past the end for a
/// final append). Anchors let the windowing layer attribute every edit to
/// exactly one window core.
#[derive(Debug, Clone)]
pub(crate) struct AnchoredToken {
    pub token: Token,
    pub anchor: usize,
    pub inserted: bool,
}

impl AnchoredToken {
    pub fn original(token: Token, anchor: usize) -> Self {
        AnchoredToken { token, anchor, inserted: false }
    }
}

#[derive(Debug, Default)]
pub(crate) struct PassCounters {
    pub inserted: u64,
    pub deleted_anchors: Vec<usize>,
}

impl PassCounters {
    pub fn changed(&self) -> bool {
        self.inserted > 0 || !self.deleted_anchors.is_empty()
    }
}

/// One annotation pass over `response`, conditioned on `template_tokens`.
/// Exactly one `forward_full`; no step calls.
fn pass_over<M: CausalModel>(
    model: &M,
    template_tokens: &[Token],
    response: &[AnchoredToken],
    puncts: &PunctuationSet,
    end_anchor: usize,
) -> Result<(Vec<AnchoredToken>, PassCounters), DecodeError> {
    let template_len = template_tokens.len();
    let mut prompt: Vec<Token> = Vec::with_capacity(template_len + response.len());
    prompt.extend_from_slice(template_tokens);
    prompt.extend(response.iter().map(|a| a.token.clone()));

    let predictions = model.forward_full(&prompt)?;

    let mut out: Vec<AnchoredToken> = Vec::with_capacity(response.len() + 4);
    let mut counters = PassCounters::default();
    let mut last_nonspace_emitted: Option<Token> = None;

    let may_insert = |last: &Option<Token>, current: Option<&Token>| {
        !last.as_ref().is_some_and(Token::is_punct)
            && !current.is_some_and(Token::is_punct)
    };

    for (k, current) in response.iter().enumerate() {
        // Prediction for this position, conditioned on everything before it.
        let predicted = &predictions[template_len + k - 1];
        let x = &current.token;

        if predicted.is_digit() && x.is_space() {
            counters.deleted_anchors.push(current.anchor);
            continue;
        }
        if puncts.contains_token(predicted) && may_insert(&last_nonspace_emitted, Some(x)) {
            out.push(AnchoredToken {
                token: predicted.clone(),
                anchor: current.anchor,
                inserted: true,
            });
            counters.inserted += 1;
            last_nonspace_emitted = Some(predicted.clone());
        }
        if !x.is_space() {
            last_nonspace_emitted = Some(x.clone());
        }
        out.push(current.clone());
    }

    // One past the response: a predicted mark is appended bare.
    let predicted = &predictions[template_len + response.len() - 1];
    if puncts.contains_token(predicted) && may_insert(&last_nonspace_emitted, None) {
        out.push(AnchoredToken { token: predicted.clone(), anchor: end_anchor, inserted: true });
        counters.inserted += 1;
    }

    Ok((out, counters))
}

/// Rebuild the prompt from the current text and rerun the pass until nothing
/// changes or `policy.max_passes` is reached.
pub(crate) fn run_fpod_pass<M: CausalModel>(
    model: &M,
    template: &PromptTemplate,
    response: &[AnchoredToken],
    puncts: &PunctuationSet,
    end_anchor: usize,
) -> Result<(Vec<AnchoredToken>, PassCounters), DecodeError> {
    let tokens: Vec<Token> = response.iter().map(|a| a.token.clone()).collect();
    let template_tokens = template.template_tokens(&tokens, puncts)?;
    pass_over(model, &template_tokens, response, puncts, end_anchor)
}

pub(crate) struct RecursionOutcome {
    pub tokens: Vec<AnchoredToken>,
    pub passes: u64,
    pub inserted: u64,
    pub deleted_anchors: Vec<usize>,
}

pub(crate) fn recursive_fpod_over<M: CausalModel>(
    model: &M,
    template: &PromptTemplate,
    start: Vec<AnchoredToken>,
    puncts: &PunctuationSet,
    end_anchor: usize,
    policy: &RecursionPolicy,
) -> Result<RecursionOutcome, DecodeError> {
    let mut current = start;
    let mut passes = 0u64;
    let mut inserted = 0u64;
    let mut deleted_anchors: Vec<usize> = Vec::new();

    while passes < policy.max_passes.max(1) {
        let (next, counters) = run_fpod_pass(model, template, &current, puncts, end_anchor)?;
        passes += 1;
        inserted += counters.inserted;
        let changed = counters.changed();
        deleted_anchors.extend(counters.deleted_anchors);
        current = next;
        if policy.stop_on_fixpoint && !changed {
            break;
        }
    }

    Ok(RecursionOutcome { tokens: current, passes, inserted, deleted_anchors })
}

fn anchored(tokens: &[Token]) -> Vec<AnchoredToken> {
    tokens.iter().cloned().enumerate().map(|(i, t)| AnchoredToken::original(t, i)).collect()
}

fn collect(tokens: Vec<AnchoredToken>) -> TokenSeq {
    tokens.into_iter().map(|a| a.token).collect()
}

/// Single-pass forward-pass-only decode over a pre-built prompt.
///
/// Reports exactly one `full_forward_calls` and zero `step_calls`; the output
/// is the annotated response region only.
pub fn decode_fpod<M: CausalModel>(
    model: &M,
    prompt: &TokenSeq,
    layout: &PromptLayout,
    puncts: &PunctuationSet,
) -> Result<DecodeResult, DecodeError> {
    layout.check(prompt)?;
    let (template_tokens, response_tokens) = prompt.tokens().split_at(layout.template_len);
    if let Some(special) = response_tokens.iter().find(|t| t.is_special()) {
        return Err(crate::prompt::PromptError::SpecialInInput(special.text().to_string()).into());
    }

    let (out, counters) =
        pass_over(model, template_tokens, &anchored(response_tokens), puncts, response_tokens.len())?;
    Ok(DecodeResult {
        output: collect(out),
        full_forward_calls: 1,
        passes: 1,
        inserted_puncts: counters.inserted,
        deleted_spaces: counters.deleted_anchors.len() as u64,
        ..DecodeResult::default()
    })
}

/// Recursive forward-pass decoding: rebuild the prompt from the current text
/// after each pass, stopping at a fixpoint or at `policy.max_passes`.
/// `full_forward_calls` equals the number of passes run.
pub fn decode_recursive_fpod<M: CausalModel>(
    model: &M,
    input: &TokenSeq,
    template: &PromptTemplate,
    policy: &RecursionPolicy,
    puncts: &PunctuationSet,
) -> Result<DecodeResult, DecodeError> {
    let outcome = recursive_fpod_over(
        model,
        template,
        anchored(input.tokens()),
        puncts,
        input.len(),
        policy,
    )?;
    Ok(DecodeResult {
        output: collect(outcome.tokens),
        full_forward_calls: outcome.passes,
        passes: outcome.passes,
        inserted_puncts: outcome.inserted,
        deleted_spaces: outcome.deleted_anchors.len() as u64,
        ..DecodeResult::default()
    })
}
