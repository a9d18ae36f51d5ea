//! Uniform clients for completion backends and entailment scorers.
//!
//! Three ways to answer a completion request: a live HTTP backend, a replay
//! cache that answers only from recorded cassettes, and deterministic mocks.
//! Scorers follow the same pattern. Every request has a stable fingerprint
//! so runs recorded once replay bit-identically forever.

mod cassette;
mod live;
mod mock;

pub use cassette::{CacheBackend, Cassette, RecordingBackend};
pub use live::{HttpScorer, LiveBackend, LiveConfig};
pub use mock::{ScorerCache, StaticBackend, TableScorer};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GatewayError {
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("cache miss for fingerprint {0}")]
    CacheMiss(String),
    #[error("api key missing for live backend")]
    MissingAuth,
    #[error("malformed backend response: {0}")]
    MalformedResponse(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("no scripted completion for this prompt")]
    NoScript,
}

impl From<std::io::Error> for GatewayError {
    fn from(err: std::io::Error) -> Self {
        GatewayError::Io(err.to_string())
    }
}

/// A completion request. Defaults follow the sampling setup used throughout:
/// nucleus sampling with top-p 0.95, temperature 0 unless diversity is asked
/// for, one sample, 1024 output tokens, stopping at the next class boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub model: String,
    pub prompt: String,
    pub temperature: f64,
    pub top_p: f64,
    pub sample_count: u32,
    pub max_output_tokens: u32,
    pub stop_sequences: Vec<String>,
}

impl CompletionRequest {
    pub fn new(model: impl Into<String>, prompt: impl Into<String>) -> Self {
        CompletionRequest {
            model: model.into(),
            prompt: prompt.into(),
            temperature: 0.0,
            top_p: 0.95,
            sample_count: 1,
            max_output_tokens: 1024,
            stop_sequences: vec!["\n\nclass".to_string()],
        }
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        self.temperature = temperature;
        self
    }

    pub fn with_samples(mut self, sample_count: u32) -> Self {
        self.sample_count = sample_count;
        self
    }

    /// Stable hash over every request field plus the sample index.
    pub fn fingerprint(&self, sample_index: u32) -> String {
        let canonical = serde_json::to_string(&(
            &self.model,
            &self.prompt,
            format!("{:?}", self.temperature),
            format!("{:?}", self.top_p),
            self.sample_count,
            self.max_output_tokens,
            &self.stop_sequences,
            sample_index,
        ))
        .expect("request fields always serialize");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        hex::encode(hasher.finalize())
    }
}

/// One cached completion, keyed by request fingerprint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRecord {
    pub fingerprint: String,
    pub completion: String,
    pub backend_id: String,
    /// Unix seconds at record time.
    pub timestamp: u64,
}

/// Entailment probabilities for a (premise, hypothesis) sentence pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntailmentScore {
    pub entailment: f64,
    pub neutral: f64,
    pub contradiction: f64,
}

impl EntailmentScore {
    /// Build a score from raw (possibly unnormalized) probabilities.
    /// Negative or non-finite inputs and zero mass are rejected.
    pub fn normalized(
        entailment: f64,
        neutral: f64,
        contradiction: f64,
    ) -> Result<EntailmentScore, GatewayError> {
        let values = [entailment, neutral, contradiction];
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(GatewayError::MalformedResponse(format!(
                "bad probabilities {values:?}"
            )));
        }
        let sum: f64 = values.iter().sum();
        if sum <= 0.0 {
            return Err(GatewayError::MalformedResponse(
                "probabilities sum to zero".to_string(),
            ));
        }
        Ok(EntailmentScore {
            entailment: entailment / sum,
            neutral: neutral / sum,
            contradiction: contradiction / sum,
        })
    }

    pub fn sums_to_one(&self) -> bool {
        (self.entailment + self.neutral + self.contradiction - 1.0).abs() <= 1e-6
    }

    /// The label with the highest probability.
    pub fn argmax(&self) -> &'static str {
        let mut best = ("entailment", self.entailment);
        if self.neutral > best.1 {
            best = ("neutral", self.neutral);
        }
        if self.contradiction > best.1 {
            best = ("contradiction", self.contradiction);
        }
        best.0
    }
}

/// Stable key for a scored sentence pair.
pub fn pair_fingerprint(premise: &str, hypothesis: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update((premise.len() as u64).to_le_bytes());
    hasher.update(premise.as_bytes());
    hasher.update(hypothesis.as_bytes());
    hex::encode(hasher.finalize())
}

/// A completion backend.
pub trait Completer: Send + Sync {
    /// Returns exactly `request.sample_count` completion texts.
    fn complete(&self, request: &CompletionRequest) -> Result<Vec<String>, GatewayError>;
    fn id(&self) -> &str;
}

/// An entailment scorer over sentence pairs.
pub trait EntailmentScorer: Send + Sync {
    fn score(&self, premise: &str, hypothesis: &str) -> Result<EntailmentScore, GatewayError>;
}
