use std::collections::VecDeque;
use std::sync::Mutex;

use crate::{ChatMessage, ModelConfig, Transport, TransportError};

/// One programmed response of a [`ScriptedTransport`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScriptedReply {
    Text(String),
    Timeout,
    AuthFailure,
    Malformed,
}

/// Replays a fixed list of replies in order and records every request.
///
/// Calls are serialized: concurrent callers each take the next reply.
#[derive(Debug, Default)]
pub struct ScriptedTransport {
    replies: Mutex<VecDeque<ScriptedReply>>,
    requests: Mutex<Vec<Vec<ChatMessage>>>,
}

impl ScriptedTransport {
    pub fn new<S: Into<String>>(responses: impl IntoIterator<Item = S>) -> Self {
        Self::from_replies(responses.into_iter().map(|s| ScriptedReply::Text(s.into())))
    }

    pub fn from_replies(replies: impl IntoIterator<Item = ScriptedReply>) -> Self {
        ScriptedTransport {
            replies: Mutex::new(replies.into_iter().collect()),
            requests: Mutex::new(Vec::new()),
        }
    }

    pub fn requests(&self) -> Vec<Vec<ChatMessage>> {
        self.requests.lock().expect("request log poisoned").clone()
    }

    pub fn request_count(&self) -> usize {
        self.requests.lock().expect("request log poisoned").len()
    }

    pub fn remaining(&self) -> usize {
        self.replies.lock().expect("reply queue poisoned").len()
    }
}

impl Transport for ScriptedTransport {
    fn send(&self, _config: &ModelConfig, messages: &[ChatMessage]) -> Result<String, TransportError> {
        let mut replies = self.replies.lock().expect("reply queue poisoned");
        self.requests.lock().expect("request log poisoned").push(messages.to_vec());
        match replies.pop_front() {
            Some(ScriptedReply::Text(t)) => Ok(t),
            Some(ScriptedReply::Timeout) => Err(TransportError::Transient("timed out".into())),
            Some(ScriptedReply::AuthFailure) => Err(TransportError::Auth("scripted rejection".into())),
            Some(ScriptedReply::Malformed) => Err(TransportError::Protocol("response has no choices".into())),
            None => Err(TransportError::Exhausted),
        }
    }
}
