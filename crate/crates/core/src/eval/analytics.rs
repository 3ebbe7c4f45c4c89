//! Closed-form throughput model for recursive forward-pass decoding.
//!
//! Treat each token as independently "clean" (not followed by a mark) with
//! probability α, the acceptance rate. A single recursive run over a window
//! of `L` tokens then produces a capped-geometric number of tokens with
//!
//! ```text
//! E(#token) = (1 − α^L) / (1 − α)
//! ```
//!
//! and the expected speedup over one-token-per-invocation generation is
//! `IF = η · E(#token)`, where η ≤ 1 prices one full forward pass against
//! one generation step. A Monte Carlo simulation of the same process
//! cross-checks the closed form.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::token::{tokenize, PunctuationSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticsError {
    #[error("acceptance rate must lie in [0, 1), got {0}")]
    AlphaOutOfRange(f64),
    #[error("efficiency factor must lie in (0, 1], got {0}")]
    EtaOutOfRange(f64),
    #[error("window length must be at least 1")]
    ZeroWindow,
    #[error("corpus has no Word or Digit tokens")]
    NoWords,
}

/// The (α, η, L) triple the improvement-factor model runs on.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AnalyticParams {
    pub alpha: f64,
    pub eta: f64,
    pub window: u32,
}

impl AnalyticParams {
    pub fn new(alpha: f64, eta: f64, window: u32) -> Result<Self, AnalyticsError> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(AnalyticsError::AlphaOutOfRange(alpha));
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(AnalyticsError::EtaOutOfRange(eta));
        }
        if window == 0 {
            return Err(AnalyticsError::ZeroWindow);
        }
        Ok(AnalyticParams { alpha, eta, window })
    }
}

/// α estimated from a corpus: one minus marks per content token.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AlphaEstimate {
    pub alpha: f64,
    pub punct_tokens: u64,
    pub content_tokens: u64,
    /// Set when the raw ratio fell outside [0, 1) and was clamped.
    pub degenerate: bool,
}

/// Estimate the acceptance rate of a punctuated corpus.
///
/// Digits count as words; separators are ignored. A corpus with no marks
/// degenerates to α = 1, which is clamped to just below 1 so the closed
/// forms stay finite.
pub fn estimate_alpha(
    punctuated_texts: &[String],
    puncts: &PunctuationSet,
) -> Result<AlphaEstimate, AnalyticsError> {
    let mut punct_tokens = 0u64;
    let mut content_tokens = 0u64;
    for text in punctuated_texts {
        for token in tokenize(text, puncts).iter() {
            if token.is_punct() {
                punct_tokens += 1;
            } else if token.is_content() {
                content_tokens += 1;
            }
        }
    }
    if content_tokens == 0 {
        return Err(AnalyticsError::NoWords);
    }
    let raw = 1.0 - punct_tokens as f64 / content_tokens as f64;
    let clamped = raw.clamp(0.0, ALPHA_CEILING);
    Ok(AlphaEstimate {
        alpha: clamped,
        punct_tokens,
        content_tokens,
        degenerate: raw != clamped,
    })
}

/// Largest representable acceptance rate strictly below 1.
pub const ALPHA_CEILING: f64 = 1.0 - f64::EPSILON;

// Below this distance from α = 1 the closed form loses precision; switch to
// the series Σ α^j ≈ L − d·L(L−1)/2 + d²·L(L−1)(L−2)/6 with d = 1 − α.
const SERIES_THRESHOLD: f64 = 1e-8;

/// Expected tokens produced by one recursive run over a window of `l` tokens:
/// `(1 − α^l) / (1 − α)`.
pub fn expected_tokens(alpha: f64, l: u32) -> Result<f64, AnalyticsError> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(AnalyticsError::AlphaOutOfRange(alpha));
    }
    if l == 0 {
        return Err(AnalyticsError::ZeroWindow);
    }
    let d = 1.0 - alpha;
    if d < SERIES_THRESHOLD {
        let lf = l as f64;
        return Ok(lf - d * lf * (lf - 1.0) / 2.0 + d * d * lf * (lf - 1.0) * (lf - 2.0) / 6.0);
    }
    Ok((1.0 - alpha.powi(l as i32)) / d)
}

/// Expected speedup of forward-pass decoding over sequential generation.
pub fn improvement_factor(alpha: f64, eta: f64, l: u32) -> Result<f64, AnalyticsError> {
    let params = AnalyticParams::new(alpha, eta, l)?;
    Ok(params.eta * expected_tokens(params.alpha, params.window)?)
}

/// Back out η from a measured speedup: `η = IF / E(#token)`.
pub fn estimate_eta(measured_if: f64, alpha: f64, l: u32) -> Result<f64, AnalyticsError> {
    Ok(measured_if / expected_tokens(alpha, l)?)
}

/// Monte Carlo cross-check of [`expected_tokens`].
///
/// Each trial draws per-token Bernoulli(α) acceptances and counts tokens up
/// to and including the first non-accepted one, capped at `l`. Deterministic
/// for a fixed seed.
pub fn simulate_expected_tokens(
    alpha: f64,
    l: u32,
    trials: u64,
    seed: u64,
) -> Result<f64, AnalyticsError> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(AnalyticsError::AlphaOutOfRange(alpha));
    }
    if l == 0 {
        return Err(AnalyticsError::ZeroWindow);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Bernoulli(alpha) as an integer threshold on raw 32-bit draws; the
    // 2^-32 quantization is far below the 1% agreement tolerance.
    let threshold = (alpha * (u32::MAX as f64)) as u32;
    let mut total: u64 = 0;
    for _ in 0..trials {
        let mut produced = 0u32;
        for _ in 0..l {
            produced += 1;
            if rng.gen::<u32>() >= threshold {
                break;
            }
        }
        total += produced as u64;
    }
    Ok(total as f64 / trials as f64)
}
