//! Smoothed n-gram model: a desk-scale stand-in for a large causal LM.
//!
//! An order-n model conditions on the n−1 trailing non-Space tokens plus the
//! separator flag (see [`ContextKey`]). Greedy queries return the argmax of
//! the add-k smoothed conditional frequency; an unseen context backs off to
//! the add-k unigram distribution. Ties break by the fixed token ordering,
//! which makes every query deterministic.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::model::{CausalModel, ContextKey, ModelError, PredictionSeq};
use crate::token::{tokenize, PunctuationSet, Token};

const FILE_FORMAT: &str = "fpod-ngram";
const FILE_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct NGramModel {
    order: usize,
    k: f64,
    /// Sorted vocabulary of every token observed as a prediction target.
    vocab: Vec<Token>,
    /// (context → next-token counts), BTree-ordered for determinism.
    counts: BTreeMap<ContextKey, BTreeMap<Token, u64>>,
    /// Marginal counts of prediction targets, the backoff distribution.
    unigrams: BTreeMap<Token, u64>,
}

impl NGramModel {
    pub fn train(
        punctuated_texts: &[String],
        order: usize,
        k: f64,
        puncts: &PunctuationSet,
    ) -> Result<Self, ModelError> {
        if punctuated_texts.is_empty() {
            return Err(ModelError::EmptyCorpus);
        }
        if order < 1 {
            return Err(ModelError::InvalidOrder(order));
        }
        if !k.is_finite() || k <= 0.0 {
            return Err(ModelError::InvalidSmoothing(k));
        }
        let context_len = order - 1;
        let mut counts: BTreeMap<ContextKey, BTreeMap<Token, u64>> = BTreeMap::new();
        let mut unigrams: BTreeMap<Token, u64> = BTreeMap::new();
        for text in punctuated_texts {
            let tokens = tokenize(text, puncts).into_tokens();
            for pos in 0..=tokens.len() {
                let key = ContextKey::trailing(&tokens[..pos], context_len);
                let next = tokens.get(pos).cloned().unwrap_or_else(Token::eos);
                *counts.entry(key).or_default().entry(next.clone()).or_insert(0) += 1;
                *unigrams.entry(next).or_insert(0) += 1;
            }
        }
        let vocab: Vec<Token> = unigrams.keys().cloned().collect();
        Ok(NGramModel { order, k, vocab, counts, unigrams })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn smoothing(&self) -> f64 {
        self.k
    }

    pub fn vocab(&self) -> &[Token] {
        &self.vocab
    }

    /// Greedy argmax prediction for a context. Counts of equal magnitude
    /// resolve to the vocabulary-least token.
    pub fn predict(&self, key: &ContextKey) -> Token {
        let table = match self.counts.get(key) {
            Some(table) => table,
            None => &self.unigrams,
        };
        table
            .iter()
            .max_by(|(ta, ca), (tb, cb)| ca.cmp(cb).then_with(|| tb.cmp(ta)))
            .map(|(t, _)| t.clone())
            .unwrap_or_else(Token::eos)
    }

    /// Add-k smoothed conditional distribution over the vocabulary.
    /// Scores are non-negative and sum to one for every context.
    pub fn distribution(&self, key: &ContextKey) -> Vec<(Token, f64)> {
        let table = match self.counts.get(key) {
            Some(table) => table,
            None => &self.unigrams,
        };
        let total: u64 = table.values().sum();
        let denom = total as f64 + self.k * self.vocab.len() as f64;
        self.vocab
            .iter()
            .map(|t| {
                let count = table.get(t).copied().unwrap_or(0);
                (t.clone(), (count as f64 + self.k) / denom)
            })
            .collect()
    }

    fn context(&self, prefix: &[Token]) -> ContextKey {
        ContextKey::trailing(prefix, self.order - 1)
    }

    /// Write a versioned JSON dump. Count tables are flattened to ordered
    /// pair lists, so the dump is byte-deterministic for a given model.
    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        let file = NGramFile {
            format: FILE_FORMAT.to_string(),
            version: FILE_VERSION,
            order: self.order,
            k: self.k,
            vocab: self.vocab.clone(),
            contexts: self
                .counts
                .iter()
                .map(|(key, table)| {
                    (key.clone(), table.iter().map(|(t, c)| (t.clone(), *c)).collect())
                })
                .collect(),
            unigrams: self.unigrams.iter().map(|(t, c)| (t.clone(), *c)).collect(),
        };
        let json = serde_json::to_string(&file).expect("model serialization cannot fail");
        fs::write(path, json).map_err(|e| ModelError::InvalidModelFile {
            path: path.display().to_string(),
            reason: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ModelError> {
        let bad = |reason: String| ModelError::InvalidModelFile {
            path: path.display().to_string(),
            reason,
        };
        let raw = fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
        let file: NGramFile = serde_json::from_str(&raw).map_err(|e| bad(e.to_string()))?;
        if file.format != FILE_FORMAT {
            return Err(bad(format!("unknown format {:?}", file.format)));
        }
        if file.version != FILE_VERSION {
            return Err(bad(format!(
                "unsupported version {} (expected {FILE_VERSION})",
                file.version
            )));
        }
        if file.order < 1 {
            return Err(bad(format!("order must be at least 1, got {}", file.order)));
        }
        if !file.k.is_finite() || file.k <= 0.0 {
            return Err(bad(format!("smoothing constant must be positive, got {}", file.k)));
        }
        Ok(NGramModel {
            order: file.order,
            k: file.k,
            vocab: file.vocab,
            counts: file
                .contexts
                .into_iter()
                .map(|(key, table)| (key, table.into_iter().collect()))
                .collect(),
            unigrams: file.unigrams.into_iter().collect(),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct NGramFile {
    format: String,
    version: u32,
    order: usize,
    k: f64,
    vocab: Vec<Token>,
    contexts: Vec<(ContextKey, Vec<(Token, u64)>)>,
    unigrams: Vec<(Token, u64)>,
}

impl CausalModel for NGramModel {
    fn forward_full(&self, tokens: &[Token]) -> Result<PredictionSeq, ModelError> {
        Ok((1..=tokens.len()).map(|j| self.predict(&self.context(&tokens[..j]))).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(texts: &[&str]) -> Vec<String> {
        texts.iter().map(|t| t.to_string()).collect()
    }

    fn train(texts: &[&str], order: usize) -> NGramModel {
        NGramModel::train(&corpus(texts), order, 0.1, &PunctuationSet::default()).unwrap()
    }

    #[test]
    fn bigram_argmax_follows_the_count_table() {
        let model = train(&["a b. a b. a c."], 2);
        // After the word "a" the separator is due; after "a " the counts are
        // b:2 versus c:1.
        let after_a = model.forward_step(&[Token::word("a")]).unwrap();
        assert_eq!(after_a, Token::space());
        let after_a_space =
            model.forward_step(&[Token::word("a"), Token::space()]).unwrap();
        assert_eq!(after_a_space, Token::word("b"));
    }

    #[test]
    fn unopposed_counts_cannot_be_overturned() {
        let model = train(&["one two three."], 4);
        let prefix = tokenize("one two", &PunctuationSet::default());
        let mut prefix = prefix.into_tokens();
        prefix.push(Token::space());
        assert_eq!(model.forward_step(&prefix).unwrap(), Token::word("three"));
    }

    #[test]
    fn unseen_context_backs_off_to_unigram_argmax() {
        let model = train(&["a b. a b. a c."], 2);
        // Hand-counted unigram table over prediction targets:
        // space:5, a:3 (two mid-text plus one start), b:2, '.':3, c:1, eos:1.
        let pred = model.predict(&ContextKey {
            tokens: vec![Token::word("never-seen")],
            after_space: false,
        });
        assert_eq!(pred, Token::space());
    }

    #[test]
    fn distributions_are_normalized() {
        let model = train(&["a b. a b. a c.", "d e f."], 3);
        let keys = [
            ContextKey { tokens: vec![Token::word("a")], after_space: true },
            ContextKey { tokens: vec![Token::word("zz")], after_space: false },
            ContextKey { tokens: vec![], after_space: false },
        ];
        for key in keys {
            let dist = model.distribution(&key);
            assert_eq!(dist.len(), model.vocab().len());
            let sum: f64 = dist.iter().map(|(_, p)| p).sum();
            assert!((sum - 1.0).abs() < 1e-12, "sum was {sum}");
            assert!(dist.iter().all(|(_, p)| *p > 0.0));
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let texts = corpus(&["a."]);
        let puncts = PunctuationSet::default();
        assert!(matches!(
            NGramModel::train(&texts, 0, 0.1, &puncts),
            Err(ModelError::InvalidOrder(0))
        ));
        assert!(matches!(
            NGramModel::train(&texts, 2, 0.0, &puncts),
            Err(ModelError::InvalidSmoothing(_))
        ));
        assert!(matches!(NGramModel::train(&[], 2, 0.1, &puncts), Err(ModelError::EmptyCorpus)));
    }

    #[test]
    fn save_load_roundtrip_preserves_predictions() {
        let model = train(&["hello, how are you?", "fine thanks."], 3);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        model.save(&path).unwrap();
        let loaded = NGramModel::load(&path).unwrap();
        assert_eq!(loaded.order(), model.order());
        let probe = tokenize("hello how are", &PunctuationSet::default());
        assert_eq!(
            model.forward_full(probe.tokens()).unwrap(),
            loaded.forward_full(probe.tokens()).unwrap()
        );
    }

    #[test]
    fn version_and_format_are_checked() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        fs::write(&path, r#"{"format":"other","version":1,"model":{}}"#).unwrap();
        assert!(matches!(NGramModel::load(&path), Err(ModelError::InvalidModelFile { .. })));
    }
}
