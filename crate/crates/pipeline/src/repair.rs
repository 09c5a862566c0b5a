//! The generate, verify and repair loop.

use rsl_core::diagnostics::{compose_feedback_with, IntuitiveRenderer, Renderer};
use rsl_core::{check, Diagnostic, Program};
use rsl_llm::{ChatClient, ChatMessage, LlmError};
use serde::Serialize;

use crate::extract::extract_rsl;
use crate::prompt::{build_prompt, PromptError, PromptParts};

pub const DEFAULT_MAX_PASSES: u32 = 5;

/// Sent when a reply contained no statements at all, so there is nothing
/// for the compiler to complain about.
pub const EMPTY_PROGRAM_FEEDBACK: &str = "Your previous reply contained no RSL statements. \
Reply with the RSL program only, one statement per line, each ending with a semicolon.";

/// One model reply and what the compiler made of it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PassRecord {
    pub assistant_text: String,
    pub extracted: String,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopOutcome {
    pub verified: bool,
    /// Present iff `verified`.
    pub program: Option<Program>,
    pub raw_history: Vec<PassRecord>,
    pub passes: u32,
    pub transcript: Vec<ChatMessage>,
}

#[derive(Debug, thiserror::Error)]
pub enum TranslateError {
    #[error("max_passes must be at least 1")]
    ZeroPasses,
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error("pass {pass}: {source}")]
    Llm {
        pass: u32,
        #[source]
        source: LlmError,
        /// Passes completed before the failure.
        history: Vec<PassRecord>,
    },
}

impl LoopOutcome {
    pub fn last_diagnostics(&self) -> &[Diagnostic] {
        self.raw_history.last().map(|r| r.diagnostics.as_slice()).unwrap_or(&[])
    }

    /// Audit record of the whole exchange.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "verified": self.verified,
            "passes": self.passes,
            "program": self.program.as_ref().map(Program::render),
            "history": self.raw_history,
            "transcript": self.transcript,
        })
    }
}

/// Runs at most `max_passes` completions. Pass 1 sends the built prompt;
/// every later pass adds the previous reply and the compiler feedback for
/// it to the conversation.
pub fn translate(parts: &PromptParts, client: &ChatClient, max_passes: u32) -> Result<LoopOutcome, TranslateError> {
    translate_with(&IntuitiveRenderer, parts, client, max_passes)
}

/// [`translate`] with a different diagnostic renderer for the feedback.
pub fn translate_with(
    renderer: &dyn Renderer,
    parts: &PromptParts,
    client: &ChatClient,
    max_passes: u32,
) -> Result<LoopOutcome, TranslateError> {
    if max_passes == 0 {
        return Err(TranslateError::ZeroPasses);
    }
    let mut transcript = build_prompt(parts)?;
    let mut history: Vec<PassRecord> = Vec::new();

    for pass in 1..=max_passes {
        let reply = match client.complete(&transcript) {
            Ok(r) => r,
            Err(source) => return Err(TranslateError::Llm { pass, source, history }),
        };
        let extracted = extract_rsl(&reply);
        let outcome = check(&extracted);
        transcript.push(ChatMessage::assistant(reply.clone()));
        let verified = outcome.diagnostics.is_empty() && !outcome.program.is_empty();
        tracing::debug!(pass, verified, diagnostics = outcome.diagnostics.len(), "translation pass");

        let feedback = if verified || pass == max_passes {
            None
        } else if outcome.diagnostics.is_empty() {
            Some(EMPTY_PROGRAM_FEEDBACK.to_owned())
        } else {
            Some(compose_feedback_with(renderer, &outcome.diagnostics, &extracted).expect("diagnostics are non-empty"))
        };
        history.push(PassRecord { assistant_text: reply, extracted, diagnostics: outcome.diagnostics });

        if verified {
            return Ok(LoopOutcome {
                verified: true,
                program: Some(outcome.program),
                raw_history: history,
                passes: pass,
                transcript,
            });
        }
        if let Some(f) = feedback {
            transcript.push(ChatMessage::user(f));
        }
    }
    Ok(LoopOutcome { verified: false, program: None, raw_history: history, passes: max_passes, transcript })
}
