//! Run manifests: the immutable record that, together with the cassette and
//! the assets, reproduces a report. Secrets are never written here.

use std::path::Path;
use std::process::Command;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Result;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct BackendManifest {
    pub kind: String,
    pub model: String,
    pub temperature: f64,
    pub top_p: f64,
    pub sample_count: u32,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub run_id: String,
    pub task: String,
    pub style: String,
    pub backend: BackendManifest,
    pub dataset_path: String,
    pub cassette_path: Option<String>,
    pub scorer: Option<String>,
    /// `git describe` over the repository holding the assets, best effort.
    pub assets_describe: String,
    pub started_at: u64,
    pub finished_at: u64,
}

pub fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn new_run_id(task: &str) -> String {
    format!("{task}-{}-{}", unix_now(), std::process::id())
}

pub fn assets_describe() -> String {
    Command::new("git")
        .args(["describe", "--always", "--dirty"])
        .output()
        .ok()
        .filter(|out| out.status.success())
        .map(|out| String::from_utf8_lossy(&out.stdout).trim().to_string())
        .unwrap_or_else(|| "unknown".to_string())
}

/// Write the manifest once; manifests are never rewritten.
pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<()> {
    let path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(manifest)?;
    std::fs::write(path, json)?;
    Ok(())
}
