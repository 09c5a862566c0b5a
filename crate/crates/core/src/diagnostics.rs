//! Diagnostics and their natural-language rendering.
//!
//! Every problem the compiler reports belongs to one of nine categories:
//! five lexical ones raised by the lexer and four syntactic ones raised by
//! the parser. Each category has a single fixed sentence, written to be
//! read by a language model rather than by a compiler engineer.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::syntax::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    Keyword,
    Identifier,
    Number,
    Character,
    Comment,
    Command,
    Parameter,
    Quantity,
    Semicolon,
}

impl Category {
    pub const ALL: [Category; 9] = [
        Category::Keyword,
        Category::Identifier,
        Category::Number,
        Category::Character,
        Category::Comment,
        Category::Command,
        Category::Parameter,
        Category::Quantity,
        Category::Semicolon,
    ];

    pub fn is_lexical(self) -> bool {
        matches!(
            self,
            Category::Keyword
                | Category::Identifier
                | Category::Number
                | Category::Character
                | Category::Comment
        )
    }

    /// Canonical message. `offending` is only used by `Character`.
    pub fn message(self, offending: &str) -> String {
        match self {
            Category::Keyword => "Keywords should be lowercase.".to_owned(),
            Category::Identifier => "The identifier is illegal.".to_owned(),
            Category::Number => "The number is illegal.".to_owned(),
            Category::Character => format!("The {offending} is an illegal character."),
            Category::Comment => "This comment has errors.".to_owned(),
            Category::Command => "The command (keyword) is illegal.".to_owned(),
            Category::Parameter => "Parameter types of the command are invalid.".to_owned(),
            Category::Quantity => "The number of parameters is illegal.".to_owned(),
            Category::Semicolon => "The statement must end with a semicolon.".to_owned(),
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub category: Category,
    pub span: SourceSpan,
    /// The offending lexeme, verbatim. For missing terminators and arity
    /// errors this is the statement text.
    pub token_text: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(category: Category, span: SourceSpan, token_text: impl Into<String>) -> Self {
        let token_text = token_text.into();
        let message = category.message(&token_text);
        Diagnostic { category, span, token_text, message }
    }

    pub fn line(&self) -> u32 {
        self.span.line
    }

    pub fn render(&self) -> String {
        render(self)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

/// `Line {line}: {message} Near token '{token_text}'.`
pub fn render(d: &Diagnostic) -> String {
    format!("Line {}: {} Near token '{}'.", d.span.line, d.message, d.token_text)
}

/// Stable sort by (line, column).
pub fn sort(diagnostics: &mut [Diagnostic]) {
    diagnostics.sort_by_key(|d| d.span.position());
}

/// Turns a diagnostic into one line of feedback text.
///
/// The default renderer produces the intuitive one-line sentences. Other
/// renderers exist so that alternative message styles can be compared
/// inside the same repair loop.
pub trait Renderer: Send + Sync {
    fn render(&self, d: &Diagnostic) -> String;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IntuitiveRenderer;

impl Renderer for IntuitiveRenderer {
    fn render(&self, d: &Diagnostic) -> String {
        render(d)
    }
}

/// Terse parser-style output (`line:col category 'token'`), for ablations
/// against the intuitive messages.
#[derive(Debug, Clone, Copy, Default)]
pub struct TechnicalRenderer;

impl Renderer for TechnicalRenderer {
    fn render(&self, d: &Diagnostic) -> String {
        let kind = if d.category.is_lexical() { "token recognition error" } else { "syntax error" };
        format!(
            "line {}:{} {kind} ({}) at '{}'",
            d.span.line,
            d.span.col_start - 1,
            d.category.to_string().to_lowercase(),
            d.token_text
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FeedbackError {
    #[error("feedback requires at least one diagnostic")]
    NoDiagnostics,
}

pub const FEEDBACK_PROGRAM_HEADER: &str = "Your previous RSL program was:";
pub const FEEDBACK_ERRORS_HEADER: &str = "The RSL compiler reported these errors:";
pub const FEEDBACK_INSTRUCTION: &str =
    "Fix the errors and reply with the corrected RSL program only, one statement per line, without explanations.";

/// Builds the repair message appended to the conversation after a failed
/// pass: program, then diagnostics in source order, then the instruction.
pub fn compose_feedback(diagnostics: &[Diagnostic], program: &str) -> Result<String, FeedbackError> {
    compose_feedback_with(&IntuitiveRenderer, diagnostics, program)
}

pub fn compose_feedback_with(
    renderer: &dyn Renderer,
    diagnostics: &[Diagnostic],
    program: &str,
) -> Result<String, FeedbackError> {
    if diagnostics.is_empty() {
        return Err(FeedbackError::NoDiagnostics);
    }
    let mut ordered = diagnostics.to_vec();
    sort(&mut ordered);

    let mut out = String::new();
    out.push_str(FEEDBACK_PROGRAM_HEADER);
    out.push('\n');
    out.push_str(program.trim_end());
    out.push_str("\n\n");
    out.push_str(FEEDBACK_ERRORS_HEADER);
    out.push('\n');
    for d in &ordered {
        out.push_str(&renderer.render(d));
        out.push('\n');
    }
    out.push('\n');
    out.push_str(FEEDBACK_INSTRUCTION);
    Ok(out)
}
