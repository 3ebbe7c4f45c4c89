//! Evaluation corpora: punctuated references paired with stripped inputs.
//!
//! The on-disk format is one JSON object per line with a required
//! `"reference"` field and an optional `"plain"` field; when `plain` is
//! absent it is derived by stripping punctuation from the reference.

use std::fs;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::token::{detokenize, tokenize, PunctuationSet, Token, TokenSeq};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read corpus {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("corpus {path} line {line}: {reason}")]
    BadRecord { path: String, line: usize, reason: String },
    #[error("corpus {path} contains no valid records")]
    Empty { path: String },
}

/// A stripped input together with its punctuated ground truth.
///
/// Invariant: tokenizing `plain` yields exactly the reference's token
/// sequence with the Punct tokens removed (and separators re-normalized).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusPair {
    pub plain: String,
    pub reference: String,
}

#[derive(Deserialize)]
struct RawRecord {
    reference: String,
    #[serde(default)]
    plain: Option<String>,
}

/// Remove every configured mark and re-normalize whitespace.
pub fn strip_punctuation(text: &str, puncts: &PunctuationSet) -> String {
    let tokens = tokenize(text, puncts);
    detokenize(&drop_puncts(&tokens))
}

/// Drop Punct tokens. A removed mark leaves a separator behind (so "a,b"
/// strips to "a b"), and the separator runs this exposes are re-collapsed
/// and trimmed.
fn drop_puncts(seq: &TokenSeq) -> TokenSeq {
    let mut out: Vec<Token> = Vec::with_capacity(seq.len());
    for token in seq.iter() {
        let replacement = match token.class() {
            crate::token::TokenClass::Punct | crate::token::TokenClass::Space => Token::space(),
            _ => token.clone(),
        };
        if replacement.is_space() && (out.is_empty() || out.last().is_some_and(Token::is_space)) {
            continue;
        }
        out.push(replacement);
    }
    while out.last().is_some_and(Token::is_space) {
        out.pop();
    }
    TokenSeq::new(out)
}

impl CorpusPair {
    /// Pair a reference with an explicit or derived plain side, validating
    /// the invariant.
    pub fn new(
        reference: String,
        plain: Option<String>,
        puncts: &PunctuationSet,
    ) -> Result<Self, String> {
        let derived = strip_punctuation(&reference, puncts);
        let plain = match plain {
            None => derived,
            Some(plain) => {
                let given = tokenize(&plain, puncts);
                if given != tokenize(&derived, puncts) {
                    return Err(format!(
                        "plain text {plain:?} does not match the reference with punctuation removed ({derived:?})"
                    ));
                }
                plain
            }
        };
        Ok(CorpusPair { plain, reference })
    }
}

/// How [`load_corpus`] treats invalid lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    /// Any invalid line aborts the load.
    Strict,
    /// Invalid lines are reported (with line numbers) and skipped.
    #[default]
    Lenient,
}

#[derive(Debug)]
pub struct LoadedCorpus {
    pub pairs: Vec<CorpusPair>,
    /// (line number, reason) for every skipped record in lenient mode.
    pub skipped: Vec<(usize, String)>,
}

pub fn load_corpus(
    path: &Path,
    puncts: &PunctuationSet,
    strictness: Strictness,
) -> Result<LoadedCorpus, CorpusError> {
    let display = path.display().to_string();
    let raw = fs::read_to_string(path)
        .map_err(|source| CorpusError::Io { path: display.clone(), source })?;

    let mut pairs = Vec::new();
    let mut skipped = Vec::new();
    for (idx, line) in raw.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Result<CorpusPair, String> = serde_json::from_str::<RawRecord>(line)
            .map_err(|e| e.to_string())
            .and_then(|record| CorpusPair::new(record.reference, record.plain, puncts));
        match parsed {
            Ok(pair) => pairs.push(pair),
            Err(reason) => match strictness {
                Strictness::Strict => {
                    return Err(CorpusError::BadRecord { path: display, line: line_no, reason })
                }
                Strictness::Lenient => skipped.push((line_no, reason)),
            },
        }
    }
    if pairs.is_empty() {
        return Err(CorpusError::Empty { path: display });
    }
    Ok(LoadedCorpus { pairs, skipped })
}

/// Convenience for model training: the reference side of every pair.
pub fn reference_texts(pairs: &[CorpusPair]) -> Vec<String> {
    pairs.iter().map(|p| p.reference.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn puncts() -> PunctuationSet {
        PunctuationSet::default()
    }

    #[test]
    fn strip_removes_marks_and_normalizes() {
        assert_eq!(strip_punctuation("hello, how are you?", &puncts()), "hello how are you");
        assert_eq!(strip_punctuation("no marks here", &puncts()), "no marks here");
        assert_eq!(strip_punctuation("a,b.", &puncts()), "a b");
    }

    #[test]
    fn strip_collapses_separator_runs_around_marks() {
        assert_eq!(strip_punctuation("a , b", &puncts()), "a b");
        assert_eq!(strip_punctuation(", a", &puncts()), "a");
        assert_eq!(strip_punctuation("a ,", &puncts()), "a");
    }

    fn write_corpus(lines: &[&str]) -> tempfile::NamedTempFile {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        for line in lines {
            writeln!(file, "{line}").unwrap();
        }
        file
    }

    #[test]
    fn plain_is_derived_when_absent() {
        let file = write_corpus(&[r#"{"reference": "hi there."}"#]);
        let corpus = load_corpus(file.path(), &puncts(), Strictness::Strict).unwrap();
        assert_eq!(corpus.pairs.len(), 1);
        assert_eq!(corpus.pairs[0].plain, "hi there");
        assert_eq!(corpus.pairs[0].reference, "hi there.");
    }

    #[test]
    fn mismatched_plain_is_rejected_with_line_number() {
        let lines = [
            r#"{"reference": "hi there."}"#,
            r#"{"plain": "hi there", "reference": "bye now."}"#,
        ];
        let file = write_corpus(&lines);
        let err = load_corpus(file.path(), &puncts(), Strictness::Strict).unwrap_err();
        match err {
            CorpusError::BadRecord { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other}"),
        }
        let lenient = load_corpus(file.path(), &puncts(), Strictness::Lenient).unwrap();
        assert_eq!(lenient.pairs.len(), 1);
        assert_eq!(lenient.skipped.len(), 1);
        assert_eq!(lenient.skipped[0].0, 2);
    }

    #[test]
    fn empty_or_all_invalid_corpora_are_errors() {
        let file = write_corpus(&[]);
        assert!(matches!(
            load_corpus(file.path(), &puncts(), Strictness::Lenient),
            Err(CorpusError::Empty { .. })
        ));
        let file = write_corpus(&["not json"]);
        assert!(matches!(
            load_corpus(file.path(), &puncts(), Strictness::Lenient),
            Err(CorpusError::Empty { .. })
        ));
        assert!(matches!(
            load_corpus(Path::new("/nonexistent/corpus.jsonl"), &puncts(), Strictness::Strict),
            Err(CorpusError::Io { .. })
        ));
    }
}
