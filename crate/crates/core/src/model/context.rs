//! Trailing-context extraction shared by the oracle and n-gram backends.

use serde::{Deserialize, Serialize};

use crate::token::Token;

/// The conditioning context for a prediction position.
///
/// `tokens` holds up to `max` trailing non-Space tokens, oldest first. The
/// walk skips Space tokens and stops at Special tokens (section markers act
/// as hard context boundaries) or at the sequence start. `after_space`
/// records whether the position immediately follows a Space token, which
/// distinguishes "about to emit the separator" from "separator already
/// emitted" — without it the two prefixes would share a key and a backend
/// could never produce a separator followed by a word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ContextKey {
    pub tokens: Vec<Token>,
    pub after_space: bool,
}

impl ContextKey {
    /// Extract the context for the position immediately after `prefix`.
    pub fn trailing(prefix: &[Token], max: usize) -> ContextKey {
        let after_space = prefix.last().is_some_and(Token::is_space);
        let mut tokens: Vec<Token> = Vec::with_capacity(max);
        for token in prefix.iter().rev() {
            if tokens.len() == max {
                break;
            }
            if token.is_special() {
                break;
            }
            if token.is_space() {
                continue;
            }
            tokens.push(token.clone());
        }
        tokens.reverse();
        ContextKey { tokens, after_space }
    }
}
