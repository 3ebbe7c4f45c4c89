//! Sequential one-token-at-a-time generation. Decoding K tokens costs K
//! sequential model invocations, which is the baseline every other strategy
//! is measured against.

use crate::decode::{DecodeError, DecodeResult};
use crate::model::CausalModel;
use crate::token::{Token, TokenSeq};

/// Generate greedily from `prompt` until the model predicts end-of-sequence
/// or `max_new_tokens` is reached. The output excludes the prompt.
///
/// `step_calls` equals the number of generated tokens, plus one when the run
/// terminated on an end-of-sequence prediction.
pub fn decode_auto_regressive<M: CausalModel>(
    model: &M,
    prompt: &TokenSeq,
    max_new_tokens: usize,
) -> Result<DecodeResult, DecodeError> {
    let mut context: Vec<Token> = prompt.tokens().to_vec();
    let mut output: Vec<Token> = Vec::new();
    let mut step_calls = 0u64;

    while output.len() < max_new_tokens {
        let next = model.forward_step(&context)?;
        step_calls += 1;
        if next.is_special() {
            break;
        }
        context.push(next.clone());
        output.push(next);
    }

    Ok(DecodeResult {
        output: TokenSeq::new(output),
        step_calls,
        passes: 1,
        ..DecodeResult::default()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelError, OracleModel, PredictionSeq};
    use crate::prompt::PromptTemplate;
    use crate::token::{tokenize, PunctuationSet};

    #[test]
    fn zero_budget_means_zero_calls() {
        let oracle = OracleModel::from_corpus(
            &["hi there.".to_string()],
            1,
            &PunctuationSet::default(),
        )
        .unwrap();
        let prompt = tokenize("hi", &PunctuationSet::default());
        let result = decode_auto_regressive(&oracle, &prompt, 0).unwrap();
        assert!(result.output.is_empty());
        assert_eq!(result.step_calls, 0);
    }

    #[test]
    fn oracle_regenerates_its_training_sentence_from_the_template() {
        let puncts = PunctuationSet::default();
        let text = "hello, how are you?";
        let oracle = OracleModel::from_corpus(&[text.to_string()], 16, &puncts).unwrap();
        let input = tokenize("hello how are you", &puncts);
        let prompt = PromptTemplate::default().build_ar_prompt(&input, &puncts).unwrap();

        let result = decode_auto_regressive(&oracle, &prompt, 64).unwrap();
        assert_eq!(result.output.text(), text);
        // Nine generated tokens plus the terminating end-of-sequence step.
        assert_eq!(result.output.len(), 9);
        assert_eq!(result.step_calls, 10);
    }

    // A model that never stops, to pin down the cost contract.
    struct Babbler;

    impl CausalModel for Babbler {
        fn forward_full(&self, tokens: &[Token]) -> Result<PredictionSeq, ModelError> {
            Ok(tokens.iter().map(|_| Token::word("on")).collect())
        }
    }

    #[test]
    fn k_tokens_take_at_least_k_steps() {
        let prompt = TokenSeq::new(vec![Token::word("go")]);
        for budget in [1usize, 7, 23] {
            let result = decode_auto_regressive(&Babbler, &prompt, budget).unwrap();
            assert_eq!(result.output.len(), budget);
            assert!(result.step_calls >= budget as u64);
            assert_eq!(result.step_calls, budget as u64);
        }
    }
}
