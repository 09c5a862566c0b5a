//! Offline stand-ins for a language model.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Duration;

use rsl_llm::{ChatClient, ChatMessage, ModelConfig, Role, Transport, TransportError};

use crate::benchmark::ORACLE_PROGRAMS;

/// Reply given to a task the stub has no program for.
pub const UNKNOWN_TASK_REPLY: &str = "I do not know how to do that.";

/// A client over an in-process transport: placeholder endpoint, no retries.
pub fn offline_client(name: &str, transport: Arc<dyn Transport>) -> ChatClient {
    let config = ModelConfig::new("http://offline.invalid/v1", name)
        .expect("static config")
        .with_retries(0, Duration::ZERO);
    ChatClient::new(config, transport)
}

/// Answers each known task text with a fixed, correct RSL program.
#[derive(Debug, Clone)]
pub struct OracleStub {
    programs: BTreeMap<String, String>,
}

impl OracleStub {
    pub fn new(programs: BTreeMap<String, String>) -> Self {
        OracleStub { programs }
    }

    /// Programs for the shipped benchmark.
    pub fn benchmark() -> Self {
        OracleStub::new(serde_json::from_str(ORACLE_PROGRAMS).expect("shipped oracle programs parse"))
    }

    pub fn program_for(&self, task: &str) -> Option<&str> {
        self.programs.get(task.trim()).map(String::as_str)
    }

    /// Index of the last user message that is a known task, and its program.
    fn locate<'a>(&'a self, messages: &[ChatMessage]) -> Option<(usize, &'a str)> {
        messages
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, m)| m.role == Role::User)
            .find_map(|(i, m)| self.program_for(&m.content).map(|p| (i, p)))
    }
}

impl Transport for OracleStub {
    fn send(&self, _config: &ModelConfig, messages: &[ChatMessage]) -> Result<String, TransportError> {
        Ok(self.locate(messages).map_or(UNKNOWN_TASK_REPLY, |(_, p)| p).to_owned())
    }
}

/// Like [`OracleStub`], but the first answer to every task is missing its
/// final semicolon. Any later pass gets the correct program.
#[derive(Debug, Clone)]
pub struct FlakyStub {
    oracle: OracleStub,
}

impl FlakyStub {
    pub fn new(oracle: OracleStub) -> Self {
        FlakyStub { oracle }
    }

    pub fn benchmark() -> Self {
        FlakyStub::new(OracleStub::benchmark())
    }
}

fn drop_last_semicolon(program: &str) -> String {
    match program.rfind(';') {
        Some(i) => format!("{}{}", &program[..i], &program[i + 1..]),
        None => program.to_owned(),
    }
}

impl Transport for FlakyStub {
    fn send(&self, _config: &ModelConfig, messages: &[ChatMessage]) -> Result<String, TransportError> {
        Ok(match self.oracle.locate(messages) {
            Some((i, p)) if i + 1 == messages.len() => drop_last_semicolon(p),
            Some((_, p)) => p.to_owned(),
            None => UNKNOWN_TASK_REPLY.to_owned(),
        })
    }
}
