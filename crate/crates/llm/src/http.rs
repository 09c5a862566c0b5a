use reqwest::blocking::Client;
use reqwest::StatusCode;
use serde::{Deserialize, Serialize};

use crate::{ChatMessage, ModelConfig, Transport, TransportError};

#[derive(Serialize)]
struct CompletionRequest<'a> {
    model: &'a str,
    messages: &'a [ChatMessage],
    temperature: f32,
    stream: bool,
}

#[derive(Deserialize)]
struct CompletionResponse {
    #[serde(default)]
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: Option<ResponseMessage>,
}

#[derive(Deserialize)]
struct ResponseMessage {
    content: Option<String>,
}

/// `POST {base_url}/chat/completions` with bearer authentication.
#[derive(Debug, Clone, Default)]
pub struct HttpTransport {
    client: Client,
}

impl HttpTransport {
    pub fn new() -> Self {
        HttpTransport { client: Client::new() }
    }
}

fn classify(err: reqwest::Error) -> TransportError {
    // reqwest errors carry the URL but never headers, so the key stays out.
    let kind = if err.is_timeout() {
        "timeout"
    } else if err.is_connect() {
        "connection failed"
    } else {
        "request failed"
    };
    TransportError::Transient(format!("{kind}: {}", err.without_url()))
}

impl Transport for HttpTransport {
    fn send(&self, config: &ModelConfig, messages: &[ChatMessage]) -> Result<String, TransportError> {
        let body = CompletionRequest {
            model: config.model_name(),
            messages,
            temperature: config.temperature(),
            stream: false,
        };
        let mut request = self.client.post(config.endpoint()).timeout(config.timeout()).json(&body);
        if let Some(key) = config.api_key() {
            request = request.bearer_auth(key.expose());
        }
        let response = request.send().map_err(classify)?;

        let status = response.status();
        if status == StatusCode::UNAUTHORIZED || status == StatusCode::FORBIDDEN {
            return Err(TransportError::Auth(format!("server answered {status}")));
        }
        if status == StatusCode::REQUEST_TIMEOUT
            || status == StatusCode::TOO_MANY_REQUESTS
            || status.is_server_error()
        {
            return Err(TransportError::Transient(format!("server answered {status}")));
        }
        if !status.is_success() {
            return Err(TransportError::Protocol(format!("unexpected status {status}")));
        }

        let text = response.text().map_err(classify)?;
        let parsed: CompletionResponse = serde_json::from_str(&text)
            .map_err(|e| TransportError::Protocol(format!("invalid JSON body: {e}")))?;
        parsed
            .choices
            .into_iter()
            .next()
            .ok_or_else(|| TransportError::Protocol("response has no choices".into()))?
            .message
            .and_then(|m| m.content)
            .ok_or_else(|| TransportError::Protocol("first choice has no content".into()))
    }
}
