//! Chat-completion client for OpenAI-compatible endpoints.
//!
//! [`ChatClient`] owns a [`ModelConfig`] and a [`Transport`]. The transport
//! performs a single request; the client validates the conversation and
//! retries transient failures with exponential backoff. Two transports
//! ship here: [`HttpTransport`] for real endpoints and [`ScriptedTransport`]
//! for deterministic tests.

mod http;
mod scripted;

use std::fmt;
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use url::Url;

pub use http::HttpTransport;
pub use scripted::{ScriptedReply, ScriptedTransport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        ChatMessage { role: Role::System, content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage { role: Role::User, content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        ChatMessage { role: Role::Assistant, content: content.into() }
    }
}

/// An API credential. Never printed.
#[derive(Clone, PartialEq, Eq)]
pub struct ApiKey(String);

impl ApiKey {
    pub fn new(key: impl Into<String>) -> Self {
        ApiKey(key.into())
    }

    pub fn expose(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for ApiKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ApiKey(***)")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("base URL `{0}` is not an absolute http(s) URL")]
    BaseUrl(String),
    #[error("model name is empty")]
    EmptyModel,
    #[error("temperature must be finite and non-negative")]
    Temperature,
    #[error("timeout must be positive")]
    Timeout,
}

#[derive(Debug, Clone)]
pub struct ModelConfig {
    base_url: Url,
    model_name: String,
    api_key: Option<ApiKey>,
    temperature: f32,
    timeout: Duration,
    max_retries: u32,
    retry_backoff: Duration,
}

impl ModelConfig {
    /// Defaults: temperature 0, 60 s timeout, 3 retries, 500 ms initial
    /// backoff.
    pub fn new(base_url: &str, model_name: &str) -> Result<ModelConfig, ConfigError> {
        let mut url = Url::parse(base_url).map_err(|_| ConfigError::BaseUrl(base_url.to_owned()))?;
        if !matches!(url.scheme(), "http" | "https") || url.cannot_be_a_base() {
            return Err(ConfigError::BaseUrl(base_url.to_owned()));
        }
        if !url.path().ends_with('/') {
            let path = format!("{}/", url.path());
            url.set_path(&path);
        }
        if model_name.trim().is_empty() {
            return Err(ConfigError::EmptyModel);
        }
        Ok(ModelConfig {
            base_url: url,
            model_name: model_name.to_owned(),
            api_key: None,
            temperature: 0.0,
            timeout: Duration::from_secs(60),
            max_retries: 3,
            retry_backoff: Duration::from_millis(500),
        })
    }

    pub fn with_api_key(mut self, key: ApiKey) -> Self {
        self.api_key = Some(key);
        self
    }

    pub fn with_temperature(mut self, t: f32) -> Result<Self, ConfigError> {
        if !t.is_finite() || t < 0.0 {
            return Err(ConfigError::Temperature);
        }
        self.temperature = t;
        Ok(self)
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Result<Self, ConfigError> {
        if timeout.is_zero() {
            return Err(ConfigError::Timeout);
        }
        self.timeout = timeout;
        Ok(self)
    }

    pub fn with_retries(mut self, max_retries: u32, backoff: Duration) -> Self {
        self.max_retries = max_retries;
        self.retry_backoff = backoff;
        self
    }

    pub fn base_url(&self) -> &Url {
        &self.base_url
    }

    pub fn model_name(&self) -> &str {
        &self.model_name
    }

    pub fn api_key(&self) -> Option<&ApiKey> {
        self.api_key.as_ref()
    }

    pub fn temperature(&self) -> f32 {
        self.temperature
    }

    pub fn timeout(&self) -> Duration {
        self.timeout
    }

    pub fn max_retries(&self) -> u32 {
        self.max_retries
    }

    pub fn retry_backoff(&self) -> Duration {
        self.retry_backoff
    }

    /// `{base_url}/chat/completions`
    pub fn endpoint(&self) -> Url {
        self.base_url.join("chat/completions").expect("relative join on a base URL")
    }
}

/// Outcome of a single transport attempt.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransportError {
    /// Network failure, timeout, rate limit or server error. Retried.
    #[error("transient failure: {0}")]
    Transient(String),
    #[error("authentication rejected: {0}")]
    Auth(String),
    #[error("malformed response: {0}")]
    Protocol(String),
    /// A scripted transport ran out of replies.
    #[error("no scripted replies left")]
    Exhausted,
}

pub trait Transport: Send + Sync {
    fn send(&self, config: &ModelConfig, messages: &[ChatMessage]) -> Result<String, TransportError>;
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LlmError {
    #[error("transport error after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("invalid conversation: {0}")]
    InvalidRequest(String),
}

fn validate_messages(messages: &[ChatMessage]) -> Result<(), LlmError> {
    match messages.first() {
        Some(m) if m.role == Role::System => {}
        _ => return Err(LlmError::InvalidRequest("conversation must start with a system message".into())),
    }
    if messages.iter().filter(|m| m.role == Role::System).count() != 1 {
        return Err(LlmError::InvalidRequest("exactly one system message is allowed".into()));
    }
    if messages
        .iter()
        .any(|m| m.role != Role::Assistant && m.content.trim().is_empty())
    {
        return Err(LlmError::InvalidRequest("system and user messages must not be empty".into()));
    }
    Ok(())
}

/// Runs one completion with retries. Returns the assistant text of the
/// first choice.
pub fn complete(
    config: &ModelConfig,
    transport: &dyn Transport,
    messages: &[ChatMessage],
) -> Result<String, LlmError> {
    validate_messages(messages)?;
    let mut attempt = 0;
    loop {
        attempt += 1;
        match transport.send(config, messages) {
            Ok(text) => return Ok(text),
            Err(TransportError::Transient(message)) if attempt <= config.max_retries => {
                let delay = config
                    .retry_backoff
                    .saturating_mul(2u32.saturating_pow(attempt - 1));
                tracing::debug!(attempt, ?delay, %message, "retrying chat completion");
                std::thread::sleep(delay);
            }
            Err(TransportError::Transient(message)) => {
                return Err(LlmError::Transport { attempts: attempt, message })
            }
            Err(TransportError::Exhausted) => {
                return Err(LlmError::Transport {
                    attempts: attempt,
                    message: TransportError::Exhausted.to_string(),
                })
            }
            Err(TransportError::Auth(m)) => return Err(LlmError::Auth(m)),
            Err(TransportError::Protocol(m)) => return Err(LlmError::Protocol(m)),
        }
    }
}

/// A model configuration bound to a transport.
#[derive(Clone)]
pub struct ChatClient {
    config: ModelConfig,
    transport: Arc<dyn Transport>,
}

impl ChatClient {
    pub fn new(config: ModelConfig, transport: Arc<dyn Transport>) -> Self {
        ChatClient { config, transport }
    }

    /// Client over HTTP. Fails if no API key is configured.
    pub fn http(config: ModelConfig) -> Result<Self, LlmError> {
        if config.api_key.is_none() {
            return Err(LlmError::Auth("no API key configured".into()));
        }
        Ok(ChatClient::new(config, Arc::new(HttpTransport::new())))
    }

    /// Client over a scripted transport, with a placeholder endpoint.
    pub fn scripted(transport: Arc<ScriptedTransport>) -> Self {
        let config = ModelConfig::new("http://scripted.invalid/v1", "scripted")
            .expect("static config")
            .with_retries(0, Duration::ZERO);
        ChatClient::new(config, transport)
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn complete(&self, messages: &[ChatMessage]) -> Result<String, LlmError> {
        complete(&self.config, self.transport.as_ref(), messages)
    }
}

impl fmt::Debug for ChatClient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChatClient").field("config", &self.config).finish_non_exhaustive()
    }
}
