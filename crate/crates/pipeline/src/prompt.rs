//! Prompt construction: system message, optional shots, user task.

use rsl_core::{check, Diagnostic};
use rsl_llm::ChatMessage;
use serde::{Deserialize, Serialize};

/// The shipped system message. Bump the suffix when the wording changes so
/// that recorded transcripts stay attributable.
pub const SYSTEM_PROMPT_V1: &str = include_str!("../assets/system_prompt_v1.txt");
pub const SHOTS_V1: &str = include_str!("../assets/shots_v1.json");

/// An exemplar task and its RSL program.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Shot {
    pub task: String,
    pub rsl: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("the task is empty")]
    EmptyTask,
    #[error("the system message is empty")]
    EmptySystemMessage,
    #[error("shot {index} has an empty task or program")]
    EmptyShot { index: usize },
    #[error("shot {index} does not verify: {}", first_message(.diagnostics))]
    InvalidShot { index: usize, diagnostics: Vec<Diagnostic> },
    #[error("malformed shot file: {0}")]
    Malformed(String),
}

fn first_message(diagnostics: &[Diagnostic]) -> String {
    diagnostics.first().map(Diagnostic::render).unwrap_or_default()
}

/// The three parts a prompt is concatenated from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptParts {
    system_message: String,
    shots: Vec<Shot>,
    task: String,
}

impl PromptParts {
    /// Every shot's program must check cleanly. The task may be empty here
    /// so that a template can be filled in later with [`Self::with_task`].
    pub fn new(
        system_message: impl Into<String>,
        shots: Vec<Shot>,
        task: impl Into<String>,
    ) -> Result<PromptParts, PromptError> {
        let system_message = system_message.into();
        if system_message.trim().is_empty() {
            return Err(PromptError::EmptySystemMessage);
        }
        for (index, shot) in shots.iter().enumerate() {
            if shot.task.trim().is_empty() || shot.rsl.trim().is_empty() {
                return Err(PromptError::EmptyShot { index });
            }
            let outcome = check(&shot.rsl);
            if !outcome.diagnostics.is_empty() {
                return Err(PromptError::InvalidShot { index, diagnostics: outcome.diagnostics });
            }
            if outcome.program.is_empty() {
                return Err(PromptError::EmptyShot { index });
            }
        }
        Ok(PromptParts { system_message, shots, task: task.into() })
    }

    /// Shipped system message and the twelve shots, one per keyword.
    pub fn default_template() -> PromptParts {
        PromptParts::new(SYSTEM_PROMPT_V1, default_shots(), "").expect("shipped shots verify")
    }

    /// Shipped system message without shots.
    pub fn zero_shot_template() -> PromptParts {
        PromptParts::new(SYSTEM_PROMPT_V1, Vec::new(), "").expect("shipped system message")
    }

    pub fn with_task(&self, task: impl Into<String>) -> PromptParts {
        PromptParts { task: task.into(), ..self.clone() }
    }

    pub fn without_shots(&self) -> PromptParts {
        PromptParts { shots: Vec::new(), ..self.clone() }
    }

    pub fn system_message(&self) -> &str {
        &self.system_message
    }

    pub fn shots(&self) -> &[Shot] {
        &self.shots
    }

    pub fn task(&self) -> &str {
        &self.task
    }
}

pub fn parse_shots(text: &str) -> Result<Vec<Shot>, PromptError> {
    serde_json::from_str(text).map_err(|e| PromptError::Malformed(e.to_string()))
}

pub fn default_shots() -> Vec<Shot> {
    parse_shots(SHOTS_V1).expect("shipped shot file parses")
}

/// System message, then a user/assistant pair per shot, then the task.
pub fn build_prompt(parts: &PromptParts) -> Result<Vec<ChatMessage>, PromptError> {
    if parts.task.trim().is_empty() {
        return Err(PromptError::EmptyTask);
    }
    let mut messages = Vec::with_capacity(2 + 2 * parts.shots.len());
    messages.push(ChatMessage::system(parts.system_message.trim_end()));
    for shot in &parts.shots {
        messages.push(ChatMessage::user(shot.task.clone()));
        messages.push(ChatMessage::assistant(shot.rsl.clone()));
    }
    messages.push(ChatMessage::user(parts.task.clone()));
    Ok(messages)
}
