//! Configuration resolution: flags beat environment variables, which beat
//! the config file. Every resolved (non-secret) value is echoed into the run
//! manifest; secrets never leave the process.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<String>,
    pub api_key: Option<String>,
    pub base_url: Option<String>,
    pub scorer_url: Option<String>,
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub model: String,
    pub api_key: Option<String>,
    pub base_url: String,
    pub scorer_url: Option<String>,
    pub jobs: usize,
}

fn env_var(name: &str) -> Option<String> {
    std::env::var(name).ok().filter(|v| !v.is_empty())
}

/// Resolve settings from (flag values, environment, optional config file).
pub fn resolve(
    config_path: Option<&Path>,
    model_flag: Option<String>,
    jobs_flag: Option<usize>,
) -> Result<Settings> {
    let file: FileConfig = match config_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read config file {}", path.display()))?;
            toml::from_str(&text)
                .with_context(|| format!("bad config file {}", path.display()))?
        }
        None => FileConfig::default(),
    };

    Ok(Settings {
        model: model_flag
            .or_else(|| env_var("CORRPUS_MODEL"))
            .or(file.model)
            .unwrap_or_else(|| "code-davinci-002".to_string()),
        api_key: env_var("CORRPUS_API_KEY").or(file.api_key),
        base_url: env_var("CORRPUS_BASE_URL")
            .or(file.base_url)
            .unwrap_or_else(|| "https://api.openai.com/v1".to_string()),
        scorer_url: env_var("CORRPUS_SCORER_URL").or(file.scorer_url),
        jobs: jobs_flag
            .or_else(|| env_var("CORRPUS_JOBS").and_then(|v| v.parse().ok()))
            .or(file.jobs)
            .unwrap_or(4),
    })
}
