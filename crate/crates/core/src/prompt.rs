//! Prompt construction for forward-pass decoding.
//!
//! A prompt is template tokens (instruction, input section, response header)
//! followed by a response region. For forward-pass-only decoding the response
//! region is a verbatim copy of the input; for auto-regressive decoding the
//! prompt stops at the response header and the model generates from there.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::token::{tokenize, PunctuationSet, Token, TokenSeq};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PromptError {
    #[error("input must contain at least one token")]
    EmptyInput,
    #[error("input token {0:?} is a Special token; Special tokens may not appear in a response region")]
    SpecialInInput(String),
    #[error("prompt layout mismatch: template {template} + response {response} != prompt length {actual}")]
    LayoutMismatch { template: usize, response: usize, actual: usize },
}

/// The (T, L) split of a prompt: `template_len` tokens of template followed
/// by `response_len` tokens of response region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptLayout {
    pub template_len: usize,
    pub response_len: usize,
}

impl PromptLayout {
    pub fn total(&self) -> usize {
        self.template_len + self.response_len
    }

    /// Check consistency against an actual prompt.
    pub fn check(&self, prompt: &TokenSeq) -> Result<(), PromptError> {
        if self.template_len < 1 || self.response_len < 1 || self.total() != prompt.len() {
            return Err(PromptError::LayoutMismatch {
                template: self.template_len,
                response: self.response_len,
                actual: prompt.len(),
            });
        }
        Ok(())
    }
}

/// Instruction text plus the section markers wrapped around input and response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplate {
    pub instruction: String,
    pub input_marker: String,
    pub response_marker: String,
}

impl Default for PromptTemplate {
    fn default() -> Self {
        PromptTemplate {
            instruction: "Restore punctuation to the following text.".to_string(),
            input_marker: "### Input:".to_string(),
            response_marker: "### Response:".to_string(),
        }
    }
}

impl PromptTemplate {
    pub fn with_instruction(instruction: impl Into<String>) -> Self {
        PromptTemplate { instruction: instruction.into(), ..Default::default() }
    }

    /// Template tokens: tokenized instruction, then the input section holding
    /// `input`, then the response header. Markers are Special tokens, so model
    /// backends treat them as context boundaries.
    pub(crate) fn template_tokens(
        &self,
        input: &[Token],
        puncts: &PunctuationSet,
    ) -> Result<Vec<Token>, PromptError> {
        if input.is_empty() {
            return Err(PromptError::EmptyInput);
        }
        if let Some(special) = input.iter().find(|t| t.is_special()) {
            return Err(PromptError::SpecialInInput(special.text().to_string()));
        }
        let mut tokens: Vec<Token> = tokenize(&self.instruction, puncts).into_tokens();
        tokens.push(Token::special(&self.input_marker));
        tokens.extend(input.iter().cloned());
        tokens.push(Token::special(&self.response_marker));
        Ok(tokens)
    }

    /// Build the forward-pass prompt: template plus a verbatim copy of `input`
    /// as the response region.
    pub fn build_fpod_prompt(
        &self,
        input: &TokenSeq,
        puncts: &PunctuationSet,
    ) -> Result<(TokenSeq, PromptLayout), PromptError> {
        let mut tokens = self.template_tokens(input, puncts)?;
        let template_len = tokens.len();
        tokens.extend(input.iter().cloned());
        let layout = PromptLayout { template_len, response_len: input.len() };
        Ok((TokenSeq::new(tokens), layout))
    }

    /// Build the generation prompt: template only, ending at the response header.
    pub fn build_ar_prompt(
        &self,
        input: &TokenSeq,
        puncts: &PunctuationSet,
    ) -> Result<TokenSeq, PromptError> {
        Ok(TokenSeq::new(self.template_tokens(input, puncts)?))
    }
}

/// Build a forward-pass prompt under the default section markers.
pub fn build_fpod_prompt(
    instruction: &str,
    input: &TokenSeq,
    puncts: &PunctuationSet,
) -> Result<(TokenSeq, PromptLayout), PromptError> {
    PromptTemplate::with_instruction(instruction).build_fpod_prompt(input, puncts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(text: &str) -> TokenSeq {
        tokenize(text, &PunctuationSet::default())
    }

    #[test]
    fn response_region_is_a_verbatim_copy() {
        let puncts = PunctuationSet::default();
        let seq = input("hello how");
        let (prompt, layout) = build_fpod_prompt("Restore punctuation.", &seq, &puncts).unwrap();
        assert_eq!(layout.response_len, 3);
        assert_eq!(layout.total(), prompt.len());
        let tail = &prompt.tokens()[layout.template_len..];
        assert_eq!(tail, seq.tokens());
        layout.check(&prompt).unwrap();
    }

    #[test]
    fn empty_input_is_rejected() {
        let puncts = PunctuationSet::default();
        let err = build_fpod_prompt("x", &TokenSeq::default(), &puncts).unwrap_err();
        assert_eq!(err, PromptError::EmptyInput);
    }

    #[test]
    fn special_tokens_in_input_are_rejected() {
        let puncts = PunctuationSet::default();
        let seq = TokenSeq::new(vec![Token::word("a"), Token::eos()]);
        let err = build_fpod_prompt("x", &seq, &puncts).unwrap_err();
        assert!(matches!(err, PromptError::SpecialInInput(_)));
    }

    #[test]
    fn empty_instruction_still_has_markers() {
        let puncts = PunctuationSet::default();
        let seq = input("you");
        let (prompt, layout) = build_fpod_prompt("", &seq, &puncts).unwrap();
        // [### Input:] [you] [### Response:] then the copy.
        assert_eq!(layout.template_len, 3);
        assert!(layout.template_len >= 1);
        assert_eq!(prompt.len(), 4);
        assert!(prompt[0].is_special());
        assert!(prompt[2].is_special());
    }

    #[test]
    fn canonical_template_token_count() {
        let puncts = PunctuationSet::default();
        let seq = input("hello how");
        let (_, layout) =
            PromptTemplate::default().build_fpod_prompt(&seq, &puncts).unwrap();
        // "Restore punctuation to the following text." is 12 tokens (6 words,
        // 5 spaces, final period), plus two markers and the 3-token input.
        assert_eq!(layout.template_len, 12 + 2 + 3);
    }

    #[test]
    fn ar_prompt_is_the_template_prefix() {
        let puncts = PunctuationSet::default();
        let seq = input("a b c");
        let template = PromptTemplate::default();
        let (prompt, layout) = template.build_fpod_prompt(&seq, &puncts).unwrap();
        let ar = template.build_ar_prompt(&seq, &puncts).unwrap();
        assert_eq!(ar.tokens(), &prompt.tokens()[..layout.template_len]);
        assert!(ar.tokens().last().unwrap().is_special());
    }

    #[test]
    fn layout_mismatch_is_detected() {
        let puncts = PunctuationSet::default();
        let (prompt, layout) = build_fpod_prompt("x", &input("a b"), &puncts).unwrap();
        let bad = PromptLayout { template_len: layout.template_len, response_len: 1 };
        assert!(bad.check(&prompt).is_err());
    }
}
