//! Tokens, token classification, and the word/punct/digit/space tokenizer.
//!
//! The tokenizer is deliberately simple: one token per word, per punctuation
//! mark, per maximal digit run, and per inter-word separator. Whitespace runs
//! collapse to a single [`TokenClass::Space`] token and leading/trailing
//! whitespace is dropped, so `detokenize(tokenize(t))` equals the
//! whitespace-normalized form of `t`.

use std::fmt;

use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeTuple;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Canonical end-of-sequence marker text.
pub const EOS_TEXT: &str = "</s>";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TokenError {
    #[error("punctuation set must not be empty")]
    EmptyPunctuationSet,
    #[error("invalid punctuation mark {0:?}: whitespace and alphanumeric characters are not allowed")]
    InvalidMark(char),
}

/// Classification of a single token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TokenClass {
    Word,
    Punct,
    Digit,
    Space,
    Special,
}

impl TokenClass {
    fn tag(self) -> &'static str {
        match self {
            TokenClass::Word => "w",
            TokenClass::Punct => "p",
            TokenClass::Digit => "d",
            TokenClass::Space => "s",
            TokenClass::Special => "x",
        }
    }

    fn from_tag(tag: &str) -> Option<Self> {
        Some(match tag {
            "w" => TokenClass::Word,
            "p" => TokenClass::Punct,
            "d" => TokenClass::Digit,
            "s" => TokenClass::Space,
            "x" => TokenClass::Special,
            _ => return None,
        })
    }
}

/// An atomic text unit: surface text plus its class.
///
/// Ordering is (class, text); the fixed order is what deterministic
/// tie-breaking in the model backends is defined against.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Token {
    class: TokenClass,
    text: String,
}

impl Token {
    pub fn word(text: impl Into<String>) -> Self {
        Token { class: TokenClass::Word, text: text.into() }
    }

    pub fn punct(mark: char) -> Self {
        Token { class: TokenClass::Punct, text: mark.to_string() }
    }

    pub fn digit(text: impl Into<String>) -> Self {
        let text = text.into();
        debug_assert!(text.chars().all(|c| c.is_ascii_digit()));
        Token { class: TokenClass::Digit, text }
    }

    /// The single inter-word separator.
    pub fn space() -> Self {
        Token { class: TokenClass::Space, text: " ".to_string() }
    }

    /// A template marker or other control token. Never appears in a response region.
    pub fn special(text: impl Into<String>) -> Self {
        Token { class: TokenClass::Special, text: text.into() }
    }

    /// The designated end-of-sequence token.
    pub fn eos() -> Self {
        Token::special(EOS_TEXT)
    }

    pub fn class(&self) -> TokenClass {
        self.class
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn is_word(&self) -> bool {
        self.class == TokenClass::Word
    }

    pub fn is_punct(&self) -> bool {
        self.class == TokenClass::Punct
    }

    pub fn is_digit(&self) -> bool {
        self.class == TokenClass::Digit
    }

    pub fn is_space(&self) -> bool {
        self.class == TokenClass::Space
    }

    pub fn is_special(&self) -> bool {
        self.class == TokenClass::Special
    }

    pub fn is_eos(&self) -> bool {
        self.class == TokenClass::Special && self.text == EOS_TEXT
    }

    /// Word or Digit: the content-bearing classes preserved by decoding.
    pub fn is_content(&self) -> bool {
        matches!(self.class, TokenClass::Word | TokenClass::Digit)
    }

    /// Classify a bare text fragment, as received from the wire protocol.
    ///
    /// Single characters from `puncts` become Punct, all-digit strings become
    /// Digit, whitespace becomes Space, the end-of-sequence marker stays
    /// Special, and anything else is a Word.
    pub fn classify(text: &str, puncts: &PunctuationSet) -> Token {
        if text == EOS_TEXT {
            return Token::eos();
        }
        if !text.is_empty() && text.chars().all(char::is_whitespace) {
            return Token::space();
        }
        let mut chars = text.chars();
        if let (Some(c), None) = (chars.next(), chars.next()) {
            if puncts.contains(c) {
                return Token::punct(c);
            }
        }
        if !text.is_empty() && text.chars().all(|c| c.is_ascii_digit()) {
            return Token::digit(text);
        }
        Token::word(text)
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

// Compact serde form: a ["w", "hello"] tuple. Keeps model dumps readable.
impl Serialize for Token {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut tup = serializer.serialize_tuple(2)?;
        tup.serialize_element(self.class.tag())?;
        tup.serialize_element(&self.text)?;
        tup.end()
    }
}

impl<'de> Deserialize<'de> for Token {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct TokenVisitor;

        impl<'de> Visitor<'de> for TokenVisitor {
            type Value = Token;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a [class, text] pair")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Token, A::Error> {
                let tag: String =
                    seq.next_element()?.ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let text: String =
                    seq.next_element()?.ok_or_else(|| de::Error::invalid_length(1, &self))?;
                let class = TokenClass::from_tag(&tag)
                    .ok_or_else(|| de::Error::custom(format!("unknown token class {tag:?}")))?;
                Ok(Token { class, text })
            }
        }

        deserializer.deserialize_tuple(2, TokenVisitor)
    }
}

/// The ordered set of punctuation marks a decoder may insert.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PunctuationSet {
    marks: Vec<char>,
}

impl Default for PunctuationSet {
    fn default() -> Self {
        PunctuationSet { marks: vec![',', '.', '?'] }
    }
}

impl PunctuationSet {
    /// Build a set from the given marks, preserving order and dropping duplicates.
    pub fn new(marks: impl IntoIterator<Item = char>) -> Result<Self, TokenError> {
        let mut out = Vec::new();
        for mark in marks {
            if mark.is_whitespace() || mark.is_alphanumeric() {
                return Err(TokenError::InvalidMark(mark));
            }
            if !out.contains(&mark) {
                out.push(mark);
            }
        }
        if out.is_empty() {
            return Err(TokenError::EmptyPunctuationSet);
        }
        Ok(PunctuationSet { marks: out })
    }

    /// Parse from a compact string like `",.?"` or `",.?!;:"`.
    pub fn parse(spec: &str) -> Result<Self, TokenError> {
        Self::new(spec.chars().filter(|c| !c.is_whitespace()))
    }

    pub fn contains(&self, mark: char) -> bool {
        self.marks.contains(&mark)
    }

    /// Whether `token` is an insertable mark under this set.
    pub fn contains_token(&self, token: &Token) -> bool {
        let mut chars = token.text().chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => token.is_punct() && self.contains(c),
            _ => false,
        }
    }

    pub fn marks(&self) -> &[char] {
        &self.marks
    }
}

/// An ordered token sequence. Produced by [`tokenize`], sequences never
/// contain two adjacent Space tokens.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenSeq(Vec<Token>);

impl TokenSeq {
    pub fn new(tokens: Vec<Token>) -> Self {
        TokenSeq(tokens)
    }

    pub fn tokens(&self) -> &[Token] {
        &self.0
    }

    pub fn into_tokens(self) -> Vec<Token> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Token> {
        self.0.iter()
    }

    /// Render back to text. See [`detokenize`].
    pub fn text(&self) -> String {
        detokenize(self)
    }

    /// The Word/Digit subsequence, i.e. the content that decoding must preserve.
    pub fn content_tokens(&self) -> Vec<&Token> {
        self.0.iter().filter(|t| t.is_content()).collect()
    }
}

impl std::ops::Deref for TokenSeq {
    type Target = [Token];

    fn deref(&self) -> &[Token] {
        &self.0
    }
}

impl FromIterator<Token> for TokenSeq {
    fn from_iter<I: IntoIterator<Item = Token>>(iter: I) -> Self {
        TokenSeq(iter.into_iter().collect())
    }
}

impl IntoIterator for TokenSeq {
    type Item = Token;
    type IntoIter = std::vec::IntoIter<Token>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a TokenSeq {
    type Item = &'a Token;
    type IntoIter = std::slice::Iter<'a, Token>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Split text into Word/Punct/Digit/Space tokens.
///
/// Every configured punctuation character becomes its own token, maximal
/// ASCII digit runs become Digit tokens, whitespace runs collapse to a single
/// Space token, and remaining character runs are Words. Empty input yields an
/// empty sequence.
pub fn tokenize(text: &str, puncts: &PunctuationSet) -> TokenSeq {
    #[derive(PartialEq)]
    enum Run {
        None,
        Word,
        Digit,
    }

    let mut tokens: Vec<Token> = Vec::new();
    let mut run = Run::None;
    let mut buf = String::new();
    let mut pending_space = false;

    let flush = |run: &mut Run, buf: &mut String, tokens: &mut Vec<Token>| {
        if buf.is_empty() {
            return;
        }
        let token = match run {
            Run::Digit => Token::digit(std::mem::take(buf)),
            _ => Token::word(std::mem::take(buf)),
        };
        tokens.push(token);
        *run = Run::None;
    };
    let sep = |pending: &mut bool, tokens: &mut Vec<Token>| {
        if *pending {
            if !tokens.is_empty() {
                tokens.push(Token::space());
            }
            *pending = false;
        }
    };

    for ch in text.chars() {
        if ch.is_whitespace() {
            flush(&mut run, &mut buf, &mut tokens);
            pending_space = true;
        } else if puncts.contains(ch) {
            flush(&mut run, &mut buf, &mut tokens);
            sep(&mut pending_space, &mut tokens);
            tokens.push(Token::punct(ch));
        } else {
            let next = if ch.is_ascii_digit() { Run::Digit } else { Run::Word };
            if run != next {
                flush(&mut run, &mut buf, &mut tokens);
                run = next;
            }
            sep(&mut pending_space, &mut tokens);
            buf.push(ch);
        }
    }
    flush(&mut run, &mut buf, &mut tokens);

    TokenSeq(tokens)
}

/// Render tokens to text: Space tokens become one space, everything else is
/// concatenated verbatim.
pub fn detokenize(seq: &TokenSeq) -> String {
    let mut out = String::new();
    for token in seq.iter() {
        out.push_str(token.text());
    }
    out
}

/// Collapse whitespace runs to single spaces and trim the ends.
pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn classes(seq: &TokenSeq) -> Vec<TokenClass> {
        seq.iter().map(|t| t.class()).collect()
    }

    #[test]
    fn tokenize_splits_words_puncts_and_spaces() {
        let seq = tokenize("hello, how are you?", &PunctuationSet::default());
        let texts: Vec<&str> = seq.iter().map(|t| t.text()).collect();
        assert_eq!(texts, vec!["hello", ",", " ", "how", " ", "are", " ", "you", "?"]);
        use TokenClass::*;
        assert_eq!(classes(&seq), vec![Word, Punct, Space, Word, Space, Word, Space, Word, Punct]);
    }

    #[test]
    fn tokenize_empty_input() {
        assert!(tokenize("", &PunctuationSet::default()).is_empty());
        assert!(tokenize("   \t\n", &PunctuationSet::default()).is_empty());
    }

    #[test]
    fn tokenize_digit_runs() {
        let seq = tokenize("call 1 2 3", &PunctuationSet::default());
        use TokenClass::*;
        assert_eq!(classes(&seq), vec![Word, Space, Digit, Space, Digit, Space, Digit]);
    }

    #[test]
    fn tokenize_mixed_word_digit_runs() {
        let seq = tokenize("gate7 abc123def", &PunctuationSet::default());
        let texts: Vec<&str> = seq.iter().map(|t| t.text()).collect();
        assert_eq!(texts, vec!["gate", "7", " ", "abc", "123", "def"]);
    }

    #[test]
    fn unconfigured_marks_stay_inside_words() {
        let seq = tokenize("wait! really?", &PunctuationSet::default());
        let texts: Vec<&str> = seq.iter().map(|t| t.text()).collect();
        assert_eq!(texts, vec!["wait!", " ", "really", "?"]);
    }

    #[test]
    fn detokenize_examples() {
        let seq = TokenSeq::new(vec![
            Token::word("hello"),
            Token::punct(','),
            Token::space(),
            Token::word("how"),
        ]);
        assert_eq!(detokenize(&seq), "hello, how");
        assert_eq!(detokenize(&TokenSeq::default()), "");

        let digits =
            TokenSeq::new(vec![Token::digit("1"), Token::digit("2"), Token::digit("3")]);
        assert_eq!(detokenize(&digits), "123");
    }

    #[test]
    fn punctuation_set_rejects_bad_marks() {
        assert_eq!(PunctuationSet::new([]), Err(TokenError::EmptyPunctuationSet));
        assert_eq!(PunctuationSet::new([' ']), Err(TokenError::InvalidMark(' ')));
        assert_eq!(PunctuationSet::new(['a']), Err(TokenError::InvalidMark('a')));
        let set = PunctuationSet::parse(",.?!").unwrap();
        assert!(set.contains('!'));
        assert!(!set.contains(';'));
    }

    #[test]
    fn classify_wire_text() {
        let puncts = PunctuationSet::default();
        assert!(Token::classify(",", &puncts).is_punct());
        assert!(Token::classify("42", &puncts).is_digit());
        assert!(Token::classify(" ", &puncts).is_space());
        assert!(Token::classify(EOS_TEXT, &puncts).is_eos());
        assert!(Token::classify("hello", &puncts).is_word());
    }

    #[test]
    fn token_serde_roundtrip() {
        for token in [Token::word("hi"), Token::punct('?'), Token::space(), Token::eos()] {
            let json = serde_json::to_string(&token).unwrap();
            let back: Token = serde_json::from_str(&json).unwrap();
            assert_eq!(token, back);
        }
        assert_eq!(serde_json::to_string(&Token::word("hi")).unwrap(), r#"["w","hi"]"#);
    }

    proptest! {
        // Round-trip: detokenize . tokenize is whitespace normalization.
        #[test]
        fn roundtrip_is_whitespace_normalization(text in "\\PC{0,60}") {
            let puncts = PunctuationSet::default();
            let rendered = detokenize(&tokenize(&text, &puncts));
            prop_assert_eq!(rendered, normalize_whitespace(&text));
        }

        // Classification totality plus per-class invariants.
        #[test]
        fn token_invariants_hold(text in "\\PC{0,60}") {
            let puncts = PunctuationSet::default();
            let seq = tokenize(&text, &puncts);
            for (i, token) in seq.iter().enumerate() {
                match token.class() {
                    TokenClass::Punct => prop_assert!(puncts.contains_token(token)),
                    TokenClass::Digit => {
                        prop_assert!(token.text().chars().all(|c| c.is_ascii_digit()))
                    }
                    TokenClass::Space => {
                        prop_assert_eq!(token.text(), " ");
                        prop_assert!(i > 0 && i + 1 < seq.len());
                        prop_assert!(!seq[i - 1].is_space());
                    }
                    TokenClass::Word => prop_assert!(!token.text().is_empty()),
                    TokenClass::Special => prop_assert!(false, "tokenizer never emits Special"),
                }
            }
        }
    }
}
