//! Cassette files: append-only JSON-lines of completion records, one record
//! per (fingerprint, sample index). Recording wraps any backend; the cache
//! backend answers only from records and errors on a miss.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use super::{Completer, CompletionRecord, CompletionRequest, GatewayError};

/// An in-memory view of a cassette file. Later records for the same
/// fingerprint win, matching append-only log replay.
#[derive(Debug, Default)]
pub struct Cassette {
    records: HashMap<String, CompletionRecord>,
}

impl Cassette {
    pub fn load(path: &Path) -> Result<Cassette, GatewayError> {
        let file = File::open(path)?;
        let mut records = HashMap::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let record: CompletionRecord = serde_json::from_str(&line).map_err(|e| {
                GatewayError::MalformedResponse(format!(
                    "bad cassette record at {}:{}: {e}",
                    path.display(),
                    idx + 1
                ))
            })?;
            records.insert(record.fingerprint.clone(), record);
        }
        Ok(Cassette { records })
    }

    pub fn get(&self, fingerprint: &str) -> Option<&CompletionRecord> {
        self.records.get(fingerprint)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Answers only from a recorded cassette; any miss is an error.
pub struct CacheBackend {
    cassette: Cassette,
    id: String,
}

impl CacheBackend {
    pub fn open(path: &Path) -> Result<CacheBackend, GatewayError> {
        Ok(CacheBackend {
            cassette: Cassette::load(path)?,
            id: format!("cache:{}", path.display()),
        })
    }

    pub fn from_cassette(cassette: Cassette) -> CacheBackend {
        CacheBackend {
            cassette,
            id: "cache".to_string(),
        }
    }
}

impl Completer for CacheBackend {
    fn complete(&self, request: &CompletionRequest) -> Result<Vec<String>, GatewayError> {
        let mut completions = Vec::with_capacity(request.sample_count as usize);
        for index in 0..request.sample_count {
            let fingerprint = request.fingerprint(index);
            let record = self
                .cassette
                .get(&fingerprint)
                .ok_or(GatewayError::CacheMiss(fingerprint))?;
            completions.push(record.completion.clone());
        }
        Ok(completions)
    }

    fn id(&self) -> &str {
        &self.id
    }
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Write-through recorder: forwards to an inner backend and appends one
/// record per sample to the cassette file. Each record is a single write
/// call, so concurrent recorders interleave whole lines.
pub struct RecordingBackend {
    inner: Box<dyn Completer>,
    file: Mutex<File>,
    path: PathBuf,
    id: String,
}

impl RecordingBackend {
    pub fn create(inner: Box<dyn Completer>, path: &Path) -> Result<RecordingBackend, GatewayError> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        let id = format!("recording:{}", inner.id());
        Ok(RecordingBackend {
            inner,
            file: Mutex::new(file),
            path: path.to_path_buf(),
            id,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

impl Completer for RecordingBackend {
    fn complete(&self, request: &CompletionRequest) -> Result<Vec<String>, GatewayError> {
        let completions = self.inner.complete(request)?;
        let timestamp = unix_now();
        let mut lines = String::new();
        for (index, completion) in completions.iter().enumerate() {
            let record = CompletionRecord {
                fingerprint: request.fingerprint(index as u32),
                completion: completion.clone(),
                backend_id: self.inner.id().to_string(),
                timestamp,
            };
            lines.push_str(&serde_json::to_string(&record).expect("records always serialize"));
            lines.push('\n');
        }
        let mut file = self.file.lock().expect("cassette writer poisoned");
        file.write_all(lines.as_bytes())?;
        Ok(completions)
    }

    fn id(&self) -> &str {
        &self.id
    }
}
