//! Model access: an OpenAI-compatible chat-completions provider, plus a
//! content-addressed archive that records and replays exchanges.

use std::path::PathBuf;
use std::sync::Mutex;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::Prompt;
use crate::util::{read_json, write_json};

#[derive(Debug, thiserror::Error)]
pub enum ProviderError {
    #[error("provider request failed: {0}")]
    Transport(String),
    #[error("provider returned HTTP {status} after {attempts} attempt(s): {body}")]
    Http {
        status: u16,
        attempts: u32,
        body: String,
    },
    #[error("provider response was malformed: {0}")]
    Malformed(String),
    #[error("API key variable `{0}` is not set")]
    MissingKey(String),
    #[error("no recorded response for request digest {0}")]
    ReplayMiss(String),
    #[error("archive i/o failed: {0}")]
    Io(#[from] std::io::Error),
}

/// A provider's answer to one prompt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exchange {
    pub provider_id: String,
    pub model_name: String,
    pub request_digest: String,
    pub temperature: f64,
    pub attempt: u8,
    pub response_text: String,
    /// Seconds since the Unix epoch when the response was received.
    pub timestamp: u64,
}

/// Something that can answer a prompt. Implementations must be stateless
/// across calls: every prompt is a fresh conversation.
pub trait Provider: Send + Sync {
    fn provider_id(&self) -> &str;
    fn complete(
        &self,
        model: &str,
        temperature: f64,
        prompt: &Prompt,
    ) -> Result<String, ProviderError>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub initial_backoff_ms: u64,
    pub max_backoff_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 5,
            initial_backoff_ms: 1000,
            max_backoff_ms: 30_000,
        }
    }
}

impl RetryPolicy {
    fn backoff(&self, retry: u32) -> Duration {
        let ms = self
            .initial_backoff_ms
            .saturating_mul(1u64 << retry.min(16));
        Duration::from_millis(ms.min(self.max_backoff_ms))
    }
}

/// OpenAI-compatible `/chat/completions` endpoint.
pub struct OpenAiProvider {
    base_url: String,
    api_key: String,
    retry: RetryPolicy,
    http: reqwest::blocking::Client,
}

impl OpenAiProvider {
    pub fn new(
        base_url: impl Into<String>,
        api_key: impl Into<String>,
        retry: RetryPolicy,
        timeout: Duration,
    ) -> Self {
        let http = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .expect("static client configuration is valid");
        Self {
            base_url: base_url.into(),
            api_key: api_key.into(),
            retry,
            http,
        }
    }

    /// Read the key from `key_var`.
    pub fn from_env(
        base_url: impl Into<String>,
        key_var: &str,
        retry: RetryPolicy,
        timeout: Duration,
    ) -> Result<Self, ProviderError> {
        let key =
            std::env::var(key_var).map_err(|_| ProviderError::MissingKey(key_var.to_string()))?;
        Ok(Self::new(base_url, key, retry, timeout))
    }

    fn url(&self) -> String {
        format!("{}/chat/completions", self.base_url.trim_end_matches('/'))
    }
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

#[derive(Deserialize)]
struct ChatMessage {
    content: Option<String>,
}

fn retryable(status: u16) -> bool {
    status == 429 || (500..600).contains(&status)
}

impl Provider for OpenAiProvider {
    fn provider_id(&self) -> &str {
        "openai-compatible"
    }

    fn complete(
        &self,
        model: &str,
        temperature: f64,
        prompt: &Prompt,
    ) -> Result<String, ProviderError> {
        let body = serde_json::json!({
            "model": model,
            "temperature": temperature,
            "messages": [
                {"role": "system", "content": prompt.system_text},
                {"role": "user", "content": prompt.user_text},
            ],
        });
        let mut attempt = 0;
        loop {
            attempt += 1;
            let outcome = self
                .http
                .post(self.url())
                .bearer_auth(&self.api_key)
                .json(&body)
                .send();
            let (status, text) = match outcome {
                Ok(resp) => {
                    let status = resp.status().as_u16();
                    (
                        status,
                        resp.text()
                            .map_err(|e| ProviderError::Transport(e.to_string()))?,
                    )
                }
                Err(e) if attempt < self.retry.max_attempts => {
                    log::warn!("provider transport error (attempt {attempt}): {e}");
                    std::thread::sleep(self.retry.backoff(attempt - 1));
                    continue;
                }
                Err(e) => return Err(ProviderError::Transport(e.to_string())),
            };
            if (200..300).contains(&status) {
                let parsed: ChatResponse = serde_json::from_str(&text)
                    .map_err(|e| ProviderError::Malformed(e.to_string()))?;
                return parsed
                    .choices
                    .into_iter()
                    .next()
                    .and_then(|c| c.message.content)
                    .ok_or_else(|| ProviderError::Malformed("no message content".into()));
            }
            if retryable(status) && attempt < self.retry.max_attempts {
                log::warn!("provider returned {status} (attempt {attempt}), backing off");
                std::thread::sleep(self.retry.backoff(attempt - 1));
                continue;
            }
            return Err(ProviderError::Http {
                status,
                attempts: attempt,
                body: text,
            });
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CacheMode {
    /// Call the provider; write nothing.
    Live,
    /// Call the provider unless the archive already answers; persist new answers.
    Record,
    /// Answer only from the archive.
    Replay,
}

/// Front end used by the pipeline: a model name, decoding settings and an
/// archive of exchanges keyed by request digest.
pub struct LlmClient {
    provider: Option<Box<dyn Provider>>,
    model: String,
    temperature: f64,
    archive: Option<PathBuf>,
    mode: CacheMode,
    calls: Mutex<u64>,
}

impl LlmClient {
    pub fn live(provider: Box<dyn Provider>, model: impl Into<String>, temperature: f64) -> Self {
        Self::build(Some(provider), model, temperature, None, CacheMode::Live)
    }

    pub fn record(
        provider: Box<dyn Provider>,
        model: impl Into<String>,
        temperature: f64,
        archive: impl Into<PathBuf>,
    ) -> Self {
        Self::build(
            Some(provider),
            model,
            temperature,
            Some(archive.into()),
            CacheMode::Record,
        )
    }

    pub fn replay(model: impl Into<String>, temperature: f64, archive: impl Into<PathBuf>) -> Self {
        Self::build(
            None,
            model,
            temperature,
            Some(archive.into()),
            CacheMode::Replay,
        )
    }

    fn build(
        provider: Option<Box<dyn Provider>>,
        model: impl Into<String>,
        temperature: f64,
        archive: Option<PathBuf>,
        mode: CacheMode,
    ) -> Self {
        Self {
            provider,
            model: model.into(),
            temperature,
            archive,
            mode,
            calls: Mutex::new(0),
        }
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn mode(&self) -> CacheMode {
        self.mode
    }

    /// Number of provider calls made (archive hits excluded).
    pub fn provider_calls(&self) -> u64 {
        *self.calls.lock().expect("counter lock")
    }

    pub fn digest(&self, prompt: &Prompt) -> String {
        prompt.digest(&self.model, self.temperature)
    }

    fn entry_path(&self, digest: &str) -> Option<PathBuf> {
        self.archive
            .as_ref()
            .map(|d| d.join(format!("{digest}.json")))
    }

    pub fn complete(&self, prompt: &Prompt) -> Result<Exchange, ProviderError> {
        let digest = self.digest(prompt);
        if let Some(path) = self
            .entry_path(&digest)
            .filter(|_| self.mode != CacheMode::Live)
        {
            if path.exists() {
                let mut exchange: Exchange = read_json(&path)?;
                exchange.attempt = prompt.attempt;
                return Ok(exchange);
            }
            if self.mode == CacheMode::Replay {
                return Err(ProviderError::ReplayMiss(digest));
            }
        }
        let provider = self
            .provider
            .as_ref()
            .ok_or_else(|| ProviderError::ReplayMiss(digest.clone()))?;
        let response_text = provider.complete(&self.model, self.temperature, prompt)?;
        *self.calls.lock().expect("counter lock") += 1;
        let exchange = Exchange {
            provider_id: provider.provider_id().to_string(),
            model_name: self.model.clone(),
            request_digest: digest.clone(),
            temperature: self.temperature,
            attempt: prompt.attempt,
            response_text,
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
        };
        if let (CacheMode::Record, Some(path)) = (self.mode, self.entry_path(&digest)) {
            write_json(&path, &exchange)?;
        }
        Ok(exchange)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generation::{build_prompt, Templates};

    struct Echo;

    impl Provider for Echo {
        fn provider_id(&self) -> &str {
            "echo"
        }
        fn complete(&self, _: &str, _: f64, prompt: &Prompt) -> Result<String, ProviderError> {
            Ok(format!("attempt {}", prompt.attempt))
        }
    }

    #[test]
    fn record_then_replay() {
        let dir = tempfile::tempdir().unwrap();
        let prompt = build_prompt(&Templates::builtin(), "print(1)\n", 1, None);
        let recorder = LlmClient::record(Box::new(Echo), "m", 0.0, dir.path());
        let first = recorder.complete(&prompt).unwrap();
        assert_eq!(recorder.provider_calls(), 1);
        // A second record call is served from the archive.
        assert_eq!(recorder.complete(&prompt).unwrap(), first);
        assert_eq!(recorder.provider_calls(), 1);

        let replayer = LlmClient::replay("m", 0.0, dir.path());
        assert_eq!(replayer.complete(&prompt).unwrap(), first);

        let other = build_prompt(&Templates::builtin(), "print(2)\n", 1, None);
        match replayer.complete(&other) {
            Err(ProviderError::ReplayMiss(d)) => assert_eq!(d, replayer.digest(&other)),
            r => panic!("expected replay miss, got {r:?}"),
        }
    }
}
