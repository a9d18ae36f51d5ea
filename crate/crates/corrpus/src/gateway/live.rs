//! Live HTTP backends: an OpenAI-style completions endpoint and a
//! three-probability entailment scoring service. Both retry transient
//! failures with exponential backoff and never log credentials.

use std::thread::sleep;
use std::time::Duration;

use serde_json::{json, Value};

use super::{Completer, CompletionRequest, EntailmentScore, EntailmentScorer, GatewayError};

#[derive(Debug, Clone)]
pub struct LiveConfig {
    /// Service root; the completions path is appended.
    pub base_url: String,
    pub api_key: Option<String>,
    pub max_retries: u32,
    pub backoff: Duration,
}

impl Default for LiveConfig {
    fn default() -> Self {
        LiveConfig {
            base_url: "https://api.openai.com/v1".to_string(),
            api_key: None,
            max_retries: 3,
            backoff: Duration::from_millis(500),
        }
    }
}

fn retryable(err: &ureq::Error) -> bool {
    match err {
        ureq::Error::StatusCode(code) => *code == 429 || *code >= 500,
        _ => true,
    }
}

fn post_with_retries(
    agent: &ureq::Agent,
    url: &str,
    api_key: Option<&str>,
    body: &Value,
    max_retries: u32,
    backoff: Duration,
) -> Result<Value, GatewayError> {
    let mut attempt = 0;
    loop {
        let mut request = agent.post(url);
        if let Some(key) = api_key {
            request = request.header("authorization", &format!("Bearer {key}"));
        }
        log::debug!("POST {url} body={body} (attempt {attempt})");
        let result = request
            .send_json(body.clone())
            .and_then(|mut response| response.body_mut().read_json::<Value>());
        match result {
            Ok(value) => {
                log::debug!("POST {url} -> {value}");
                return Ok(value);
            }
            Err(err) if attempt < max_retries && retryable(&err) => {
                let wait = backoff * 2u32.saturating_pow(attempt);
                log::debug!("POST {url} failed ({err}); retrying in {wait:?}");
                sleep(wait);
                attempt += 1;
            }
            Err(err) => return Err(GatewayError::Transport(err.to_string())),
        }
    }
}

/// OpenAI-compatible completions backend.
pub struct LiveBackend {
    config: LiveConfig,
    agent: ureq::Agent,
    id: String,
}

impl LiveBackend {
    pub fn new(config: LiveConfig) -> Result<LiveBackend, GatewayError> {
        if config.api_key.is_none() {
            return Err(GatewayError::MissingAuth);
        }
        let id = format!("live:{}", config.base_url);
        Ok(LiveBackend {
            config,
            agent: ureq::Agent::new_with_defaults(),
            id,
        })
    }
}

impl Completer for LiveBackend {
    fn complete(&self, request: &CompletionRequest) -> Result<Vec<String>, GatewayError> {
        let url = format!("{}/completions", self.config.base_url.trim_end_matches('/'));
        let body = json!({
            "model": request.model,
            "prompt": request.prompt,
            "temperature": request.temperature,
            "top_p": request.top_p,
            "n": request.sample_count,
            "max_tokens": request.max_output_tokens,
            "stop": request.stop_sequences,
        });
        let value = post_with_retries(
            &self.agent,
            &url,
            self.config.api_key.as_deref(),
            &body,
            self.config.max_retries,
            self.config.backoff,
        )?;
        let choices = value
            .get("choices")
            .and_then(Value::as_array)
            .ok_or_else(|| GatewayError::MalformedResponse("no choices array".to_string()))?;
        let texts: Vec<String> = choices
            .iter()
            .map(|c| {
                c.get("text")
                    .and_then(Value::as_str)
                    .map(str::to_string)
                    .ok_or_else(|| GatewayError::MalformedResponse("choice without text".to_string()))
            })
            .collect::<Result<_, _>>()?;
        if texts.len() != request.sample_count as usize {
            return Err(GatewayError::MalformedResponse(format!(
                "asked for {} samples, got {}",
                request.sample_count,
                texts.len()
            )));
        }
        Ok(texts)
    }

    fn id(&self) -> &str {
        &self.id
    }
}

/// Remote entailment scorer: POST {premise, hypothesis}, expect three
/// probabilities back. Responses are normalized to sum to one.
pub struct HttpScorer {
    url: String,
    api_key: Option<String>,
    agent: ureq::Agent,
    max_retries: u32,
    backoff: Duration,
}

impl HttpScorer {
    pub fn new(url: impl Into<String>, api_key: Option<String>) -> HttpScorer {
        HttpScorer {
            url: url.into(),
            api_key,
            agent: ureq::Agent::new_with_defaults(),
            max_retries: 3,
            backoff: Duration::from_millis(500),
        }
    }
}

impl EntailmentScorer for HttpScorer {
    fn score(&self, premise: &str, hypothesis: &str) -> Result<EntailmentScore, GatewayError> {
        let body = json!({ "premise": premise, "hypothesis": hypothesis });
        let value = post_with_retries(
            &self.agent,
            &self.url,
            self.api_key.as_deref(),
            &body,
            self.max_retries,
            self.backoff,
        )?;
        let field = |name: &str| {
            value
                .get(name)
                .and_then(Value::as_f64)
                .ok_or_else(|| GatewayError::MalformedResponse(format!("missing `{name}`")))
        };
        EntailmentScore::normalized(
            field("entailment")?,
            field("neutral")?,
            field("contradiction")?,
        )
    }
}
