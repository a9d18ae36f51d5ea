//! Deterministic test doubles: a scripted completion backend keyed by prompt
//! text, and a lookup-table entailment scorer with optional persistence
//! through [`super::pair_fingerprint`]-keyed caches.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{
    pair_fingerprint, Completer, CompletionRequest, EntailmentScore, EntailmentScorer,
    GatewayError,
};

/// Answers each prompt with a fixed list of completions.
#[derive(Debug, Default)]
pub struct StaticBackend {
    by_prompt: HashMap<String, Vec<String>>,
    id: String,
}

impl StaticBackend {
    pub fn new() -> StaticBackend {
        StaticBackend {
            by_prompt: HashMap::new(),
            id: "static".to_string(),
        }
    }

    pub fn insert(&mut self, prompt: impl Into<String>, completions: Vec<String>) {
        self.by_prompt.insert(prompt.into(), completions);
    }
}

impl Completer for StaticBackend {
    fn complete(&self, request: &CompletionRequest) -> Result<Vec<String>, GatewayError> {
        let scripted = self
            .by_prompt
            .get(&request.prompt)
            .ok_or(GatewayError::NoScript)?;
        let mut out = Vec::with_capacity(request.sample_count as usize);
        for index in 0..request.sample_count as usize {
            // Cycle when fewer scripted samples than requested.
            let text = scripted
                .get(index)
                .or_else(|| scripted.last())
                .ok_or(GatewayError::NoScript)?;
            out.push(text.clone());
        }
        Ok(out)
    }

    fn id(&self) -> &str {
        &self.id
    }
}

/// Exact-pair lookup scorer with a default for unknown pairs.
pub struct TableScorer {
    pairs: HashMap<(String, String), EntailmentScore>,
    default: EntailmentScore,
}

impl TableScorer {
    pub fn new(default: EntailmentScore) -> TableScorer {
        TableScorer {
            pairs: HashMap::new(),
            default,
        }
    }

    /// A scorer that answers every pair identically.
    pub fn constant(score: EntailmentScore) -> TableScorer {
        TableScorer::new(score)
    }

    pub fn insert(&mut self, premise: impl Into<String>, hypothesis: impl Into<String>, score: EntailmentScore) {
        self.pairs.insert((premise.into(), hypothesis.into()), score);
    }
}

impl EntailmentScorer for TableScorer {
    fn score(&self, premise: &str, hypothesis: &str) -> Result<EntailmentScore, GatewayError> {
        Ok(self
            .pairs
            .get(&(premise.to_string(), hypothesis.to_string()))
            .copied()
            .unwrap_or(self.default))
    }
}

#[derive(Serialize, Deserialize)]
struct ScorerRecord {
    fingerprint: String,
    entailment: f64,
    neutral: f64,
    contradiction: f64,
}

/// Memoizing wrapper around a scorer: results are cached by sentence-pair
/// hash, optionally persisted as JSON lines. Without an inner scorer it is a
/// pure replay cache that errors on a miss.
pub struct ScorerCache {
    inner: Option<Box<dyn EntailmentScorer>>,
    map: Mutex<HashMap<String, EntailmentScore>>,
    writer: Option<Mutex<File>>,
}

impl ScorerCache {
    pub fn memoizing(inner: Box<dyn EntailmentScorer>) -> ScorerCache {
        ScorerCache {
            inner: Some(inner),
            map: Mutex::new(HashMap::new()),
            writer: None,
        }
    }

    /// Record through to `path` while consulting `inner` on misses.
    pub fn recording(
        inner: Box<dyn EntailmentScorer>,
        path: &Path,
    ) -> Result<ScorerCache, GatewayError> {
        let map = Self::load_map(path)?;
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(ScorerCache {
            inner: Some(inner),
            map: Mutex::new(map),
            writer: Some(Mutex::new(file)),
        })
    }

    /// Replay-only cache over an existing record file.
    pub fn replay(path: &Path) -> Result<ScorerCache, GatewayError> {
        Ok(ScorerCache {
            inner: None,
            map: Mutex::new(Self::load_map(path)?),
            writer: None,
        })
    }

    fn load_map(path: &Path) -> Result<HashMap<String, EntailmentScore>, GatewayError> {
        let mut map = HashMap::new();
        if !path.exists() {
            return Ok(map);
        }
        for line in BufReader::new(File::open(path)?).lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let record: ScorerRecord = serde_json::from_str(&line)
                .map_err(|e| GatewayError::MalformedResponse(format!("bad scorer record: {e}")))?;
            map.insert(
                record.fingerprint,
                EntailmentScore {
                    entailment: record.entailment,
                    neutral: record.neutral,
                    contradiction: record.contradiction,
                },
            );
        }
        Ok(map)
    }
}

impl EntailmentScorer for ScorerCache {
    fn score(&self, premise: &str, hypothesis: &str) -> Result<EntailmentScore, GatewayError> {
        let fingerprint = pair_fingerprint(premise, hypothesis);
        if let Some(hit) = self.map.lock().expect("scorer cache poisoned").get(&fingerprint) {
            return Ok(*hit);
        }
        let Some(inner) = &self.inner else {
            return Err(GatewayError::CacheMiss(fingerprint));
        };
        let score = inner.score(premise, hypothesis)?;
        self.map
            .lock()
            .expect("scorer cache poisoned")
            .insert(fingerprint.clone(), score);
        if let Some(writer) = &self.writer {
            let record = ScorerRecord {
                fingerprint,
                entailment: score.entailment,
                neutral: score.neutral,
                contradiction: score.contradiction,
            };
            let mut line = serde_json::to_string(&record).expect("records always serialize");
            line.push('\n');
            writer
                .lock()
                .expect("scorer cache poisoned")
                .write_all(line.as_bytes())?;
        }
        Ok(score)
    }
}
