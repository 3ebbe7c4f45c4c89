//! Wiring of models, templates, windows, and decoders into one restore
//! pipeline. This is the surface the CLI and the C bindings drive.

use std::path::Path;

use thiserror::Error;

use crate::config::Config;
use crate::decode::{
    decode_auto_regressive, decode_speculative, DecodeError, DecodeResult, RecursionPolicy,
};
use crate::eval::corpus::{load_corpus, reference_texts, Strictness};
use crate::model::{CausalModel, ModelError, NGramModel, OracleModel, RemoteModel};
use crate::prompt::PromptTemplate;
use crate::token::{tokenize, PunctuationSet, TokenSeq};
use crate::window::{decode_long, WindowSpec};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid model spec {spec:?}: {reason}; expected oracle:<corpus.jsonl>[,order=N], ngram:<model file>, or remote:<host:port>")]
    BadModelSpec { spec: String, reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Corpus(#[from] crate::eval::CorpusError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
}

/// Which decoding strategy to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderKind {
    AutoRegressive,
    Speculative,
    Fpod,
    RecursiveFpod,
}

impl DecoderKind {
    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "ar" => DecoderKind::AutoRegressive,
            "sd" => DecoderKind::Speculative,
            "fpod" => DecoderKind::Fpod,
            "rfpod" => DecoderKind::RecursiveFpod,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            DecoderKind::AutoRegressive => "ar",
            DecoderKind::Speculative => "sd",
            DecoderKind::Fpod => "fpod",
            DecoderKind::RecursiveFpod => "rfpod",
        }
    }
}

/// A parsed `--model` / `--assistant` argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelSpec {
    /// Lookup oracle built from a punctuated corpus file.
    Oracle { path: String, order: usize },
    /// Persisted n-gram model file.
    Ngram { path: String },
    /// Remote model server address.
    Remote { addr: String },
}

impl ModelSpec {
    pub fn parse(spec: &str) -> Result<Self, EngineError> {
        let bad = |reason: &str| EngineError::BadModelSpec {
            spec: spec.to_string(),
            reason: reason.to_string(),
        };
        let (kind, rest) = spec.split_once(':').ok_or_else(|| bad("missing ':'"))?;
        match kind {
            "oracle" => {
                let mut path = rest;
                let mut order = 1usize;
                if let Some((p, opt)) = rest.split_once(',') {
                    path = p;
                    let value = opt
                        .strip_prefix("order=")
                        .ok_or_else(|| bad("unknown option, expected order=N"))?;
                    order = value.parse().map_err(|_| bad("order must be an integer"))?;
                }
                if path.is_empty() {
                    return Err(bad("missing corpus path"));
                }
                Ok(ModelSpec::Oracle { path: path.to_string(), order })
            }
            "ngram" => {
                if rest.is_empty() {
                    return Err(bad("missing model path"));
                }
                Ok(ModelSpec::Ngram { path: rest.to_string() })
            }
            "remote" => {
                if rest.is_empty() {
                    return Err(bad("missing address"));
                }
                Ok(ModelSpec::Remote { addr: rest.to_string() })
            }
            other => Err(bad(&format!("unknown backend {other:?}"))),
        }
    }

    pub fn build(&self, puncts: &PunctuationSet) -> Result<Box<dyn CausalModel>, EngineError> {
        Ok(match self {
            ModelSpec::Oracle { path, order } => {
                let corpus = load_corpus(Path::new(path), puncts, Strictness::Lenient)?;
                Box::new(OracleModel::from_corpus(
                    &reference_texts(&corpus.pairs),
                    *order,
                    puncts,
                )?)
            }
            ModelSpec::Ngram { path } => Box::new(NGramModel::load(Path::new(path))?),
            ModelSpec::Remote { addr } => {
                Box::new(RemoteModel::connect(addr.clone(), puncts.clone()))
            }
        })
    }
}

/// A model plus everything needed to restore punctuation end to end.
pub struct Engine {
    pub model: Box<dyn CausalModel>,
    pub template: PromptTemplate,
    pub puncts: PunctuationSet,
    pub window: WindowSpec,
    pub policy: RecursionPolicy,
}

impl Engine {
    pub fn new(model: Box<dyn CausalModel>, config: &Config) -> Self {
        Engine {
            model,
            template: config.template.clone(),
            puncts: config.puncts.clone(),
            window: config.window,
            policy: config.policy,
        }
    }

    /// Generation budget for the sequential decoders: generous enough for
    /// every input token plus inserted marks.
    pub fn generation_budget(input_len: usize) -> usize {
        2 * input_len + 16
    }

    /// Decode pre-tokenized input with the selected strategy. `assistant` is
    /// required for (and only used by) speculative decoding.
    pub fn decode_tokens(
        &self,
        kind: DecoderKind,
        assistant: Option<&dyn CausalModel>,
        input: &TokenSeq,
    ) -> Result<DecodeResult, EngineError> {
        if input.is_empty() {
            return Ok(DecodeResult::default());
        }
        let result = match kind {
            DecoderKind::AutoRegressive => {
                let prompt = self
                    .template
                    .build_ar_prompt(input, &self.puncts)
                    .map_err(DecodeError::from)?;
                decode_auto_regressive(&self.model, &prompt, Self::generation_budget(input.len()))?
            }
            DecoderKind::Speculative => {
                let assistant = assistant.expect("speculative decoding requires an assistant");
                let prompt = self
                    .template
                    .build_ar_prompt(input, &self.puncts)
                    .map_err(DecodeError::from)?;
                decode_speculative(
                    &self.model,
                    &assistant,
                    &prompt,
                    Self::generation_budget(input.len()),
                )?
            }
            DecoderKind::Fpod => decode_long(
                &self.model,
                input,
                &self.window,
                &self.template,
                &RecursionPolicy::single_pass(),
                &self.puncts,
            )?,
            DecoderKind::RecursiveFpod => decode_long(
                &self.model,
                input,
                &self.window,
                &self.template,
                &self.policy,
                &self.puncts,
            )?,
        };
        Ok(result)
    }

    /// Restore punctuation in plain text. Empty input stays empty.
    pub fn restore(
        &self,
        kind: DecoderKind,
        assistant: Option<&dyn CausalModel>,
        text: &str,
    ) -> Result<(String, DecodeResult), EngineError> {
        let input = tokenize(text, &self.puncts);
        let result = self.decode_tokens(kind, assistant, &input)?;
        Ok((result.output.text(), result))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_specs_parse() {
        assert_eq!(
            ModelSpec::parse("oracle:corpus.jsonl").unwrap(),
            ModelSpec::Oracle { path: "corpus.jsonl".into(), order: 1 }
        );
        assert_eq!(
            ModelSpec::parse("oracle:c.jsonl,order=4").unwrap(),
            ModelSpec::Oracle { path: "c.jsonl".into(), order: 4 }
        );
        assert_eq!(
            ModelSpec::parse("ngram:model.json").unwrap(),
            ModelSpec::Ngram { path: "model.json".into() }
        );
        assert_eq!(
            ModelSpec::parse("remote:127.0.0.1:9000").unwrap(),
            ModelSpec::Remote { addr: "127.0.0.1:9000".into() }
        );
        assert!(ModelSpec::parse("nope").is_err());
        assert!(ModelSpec::parse("oracle:").is_err());
        assert!(ModelSpec::parse("oracle:c.jsonl,depth=2").is_err());
    }

    #[test]
    fn end_to_end_restore_with_an_oracle() {
        let config = Config::default();
        let model = Box::new(
            crate::model::OracleModel::from_corpus(
                &["hello, how are you?".to_string()],
                1,
                &config.puncts,
            )
            .unwrap(),
        );
        let engine = Engine::new(model, &config);
        let (text, result) =
            engine.restore(DecoderKind::RecursiveFpod, None, "hello how are you").unwrap();
        assert_eq!(text, "hello, how are you?");
        assert!(result.passes >= 1);

        let (empty, result) = engine.restore(DecoderKind::RecursiveFpod, None, "").unwrap();
        assert_eq!(empty, "");
        assert_eq!(result.passes, 0);
    }
}
