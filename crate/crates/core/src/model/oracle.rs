//! Deterministic lookup oracle built from a punctuated reference corpus.
//!
//! For every prefix position in the tokenized corpus the build records
//! (context key, observed next token); the end of each text records the
//! end-of-sequence token. The first occurrence of a key wins, and keys that
//! later reappear with a *different* next token are counted as collisions.
//! Unseen contexts predict end-of-sequence.

use std::collections::HashMap;

use crate::model::{CausalModel, ContextKey, ModelError, PredictionSeq};
use crate::token::{tokenize, PunctuationSet, Token};

pub struct OracleModel {
    context_map: HashMap<ContextKey, Token>,
    context_order: usize,
    collisions: usize,
}

impl OracleModel {
    /// Build from punctuated texts. `context_order` is the number of trailing
    /// non-Space tokens used as the key (1 = bigram oracle).
    pub fn from_corpus(
        punctuated_texts: &[String],
        context_order: usize,
        puncts: &PunctuationSet,
    ) -> Result<Self, ModelError> {
        if punctuated_texts.is_empty() {
            return Err(ModelError::EmptyCorpus);
        }
        if context_order < 1 {
            return Err(ModelError::InvalidOrder(context_order));
        }
        let mut context_map: HashMap<ContextKey, Token> = HashMap::new();
        let mut collisions = 0usize;
        for text in punctuated_texts {
            let tokens = tokenize(text, puncts).into_tokens();
            for pos in 0..=tokens.len() {
                let key = ContextKey::trailing(&tokens[..pos], context_order);
                let next = tokens.get(pos).cloned().unwrap_or_else(Token::eos);
                match context_map.get(&key) {
                    None => {
                        context_map.insert(key, next);
                    }
                    Some(existing) if *existing != next => collisions += 1,
                    Some(_) => {}
                }
            }
        }
        Ok(OracleModel { context_map, context_order, collisions })
    }

    /// Number of (key, next) observations that conflicted with an earlier one.
    pub fn collisions(&self) -> usize {
        self.collisions
    }

    pub fn context_order(&self) -> usize {
        self.context_order
    }

    pub fn predict(&self, key: &ContextKey) -> Token {
        self.context_map.get(key).cloned().unwrap_or_else(Token::eos)
    }
}

impl CausalModel for OracleModel {
    fn forward_full(&self, tokens: &[Token]) -> Result<PredictionSeq, ModelError> {
        Ok((1..=tokens.len())
            .map(|j| self.predict(&ContextKey::trailing(&tokens[..j], self.context_order)))
            .collect())
    }
}
