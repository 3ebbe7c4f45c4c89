//! Run configuration: punctuation set, template text, window geometry, and
//! the recursion cap. Loadable from a TOML file; every key has a default.
//!
//! ```toml
//! puncts = ",.?"
//!
//! [template]
//! instruction = "Restore punctuation to the following text."
//! input_marker = "### Input:"
//! response_marker = "### Response:"
//!
//! [window]
//! core = 50
//! pad = 10
//!
//! [recursion]
//! max_passes = 5
//! stop_on_fixpoint = true
//! ```

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::decode::RecursionPolicy;
use crate::prompt::PromptTemplate;
use crate::token::{PunctuationSet, TokenError};
use crate::window::WindowSpec;

/// Environment variable that overrides the config file path.
pub const CONFIG_ENV: &str = "FPOD_CONFIG";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: toml::de::Error,
    },
    #[error("config {path}: {source}")]
    Puncts {
        path: String,
        #[source]
        source: TokenError,
    },
}

#[derive(Debug, Clone, Default)]
pub struct Config {
    pub puncts: PunctuationSet,
    pub template: PromptTemplate,
    pub window: WindowSpec,
    pub policy: RecursionPolicy,
}

#[derive(Deserialize, Default)]
struct RawConfig {
    puncts: Option<String>,
    template: Option<RawTemplate>,
    window: Option<RawWindow>,
    recursion: Option<RawRecursion>,
}

#[derive(Deserialize, Default)]
struct RawTemplate {
    instruction: Option<String>,
    input_marker: Option<String>,
    response_marker: Option<String>,
}

#[derive(Deserialize, Default)]
struct RawWindow {
    core: Option<usize>,
    pad: Option<usize>,
}

#[derive(Deserialize, Default)]
struct RawRecursion {
    max_passes: Option<u64>,
    stop_on_fixpoint: Option<bool>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let display = path.display().to_string();
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: display.clone(), source })?;
        let raw: RawConfig = toml::from_str(&text)
            .map_err(|source| ConfigError::Parse { path: display.clone(), source })?;

        let mut config = Config::default();
        if let Some(spec) = raw.puncts {
            config.puncts = PunctuationSet::parse(&spec)
                .map_err(|source| ConfigError::Puncts { path: display, source })?;
        }
        if let Some(t) = raw.template {
            if let Some(v) = t.instruction {
                config.template.instruction = v;
            }
            if let Some(v) = t.input_marker {
                config.template.input_marker = v;
            }
            if let Some(v) = t.response_marker {
                config.template.response_marker = v;
            }
        }
        if let Some(w) = raw.window {
            config.window = WindowSpec::new(
                w.core.unwrap_or(config.window.core_len),
                w.pad.unwrap_or(config.window.pad_len),
            );
        }
        if let Some(r) = raw.recursion {
            if let Some(v) = r.max_passes {
                config.policy.max_passes = v.max(1);
            }
            if let Some(v) = r.stop_on_fixpoint {
                config.policy.stop_on_fixpoint = v;
            }
        }
        Ok(config)
    }

    /// Load from an explicit path, else from `FPOD_CONFIG`, else defaults.
    pub fn resolve(explicit: Option<&Path>) -> Result<Self, ConfigError> {
        if let Some(path) = explicit {
            return Self::load(path);
        }
        if let Ok(path) = std::env::var(CONFIG_ENV) {
            if !path.is_empty() {
                return Self::load(Path::new(&path));
            }
        }
        Ok(Config::default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn defaults_match_the_documented_values() {
        let config = Config::default();
        assert_eq!(config.puncts.marks(), &[',', '.', '?']);
        assert_eq!(config.window, WindowSpec { core_len: 50, pad_len: 10 });
        assert_eq!(config.policy.max_passes, 5);
        assert!(config.policy.stop_on_fixpoint);
    }

    #[test]
    fn partial_files_override_only_what_they_name() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(
            file,
            "puncts = \",.?!\"\n[window]\ncore = 20\n[recursion]\nmax_passes = 2\n"
        )
        .unwrap();
        let config = Config::load(file.path()).unwrap();
        assert!(config.puncts.contains('!'));
        assert_eq!(config.window, WindowSpec { core_len: 20, pad_len: 10 });
        assert_eq!(config.policy.max_passes, 2);
        assert_eq!(config.template, PromptTemplate::default());
    }

    #[test]
    fn bad_files_are_reported() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(file, "puncts = 7").unwrap();
        assert!(matches!(Config::load(file.path()), Err(ConfigError::Parse { .. })));

        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(file, "puncts = \"ab\"").unwrap();
        assert!(matches!(Config::load(file.path()), Err(ConfigError::Puncts { .. })));
    }
}
