//! Tokens, source spans and the program tree shared by every stage.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A single-line source range. Lines and columns are 1-based and the end
/// column is inclusive. Columns count characters, not bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SourceSpan {
    pub line: u32,
    pub col_start: u32,
    pub col_end: u32,
}

impl SourceSpan {
    pub fn new(line: u32, col_start: u32, col_end: u32) -> Self {
        assert!(line >= 1 && col_start >= 1, "spans are 1-based");
        assert!(col_end >= col_start, "span end precedes start");
        SourceSpan { line, col_start, col_end }
    }

    /// Sort key used for diagnostic ordering.
    pub fn position(&self) -> (u32, u32) {
        (self.line, self.col_start)
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}-{}", self.line, self.col_start, self.col_end)
    }
}

/// Parameter kinds a statement can take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamKind {
    Number,
    Object,
}

impl fmt::Display for ParamKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParamKind::Number => "number",
            ParamKind::Object => "object",
        })
    }
}

/// The twelve robot skills of the language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Forward,
    Backward,
    TurnLeft,
    TurnRight,
    LookUp,
    LookDown,
    LookLeft,
    LookRight,
    Perceive,
    Approach,
    GoTo,
    Grasp,
}

impl Command {
    pub const ALL: [Command; 12] = [
        Command::Forward,
        Command::Backward,
        Command::TurnLeft,
        Command::TurnRight,
        Command::LookUp,
        Command::LookDown,
        Command::LookLeft,
        Command::LookRight,
        Command::Perceive,
        Command::Approach,
        Command::GoTo,
        Command::Grasp,
    ];

    /// Source spelling of the keyword.
    pub fn keyword(self) -> &'static str {
        match self {
            Command::Forward => "forward",
            Command::Backward => "backward",
            Command::TurnLeft => "turnleft",
            Command::TurnRight => "turnright",
            Command::LookUp => "lookup",
            Command::LookDown => "lookdown",
            Command::LookLeft => "lookleft",
            Command::LookRight => "lookright",
            Command::Perceive => "perceive",
            Command::Approach => "approach",
            Command::GoTo => "goto",
            Command::Grasp => "grasp",
        }
    }

    /// Exact (case-sensitive) keyword lookup.
    pub fn from_keyword(text: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.keyword() == text)
    }

    /// Case-insensitive lookup, used to detect miscased keywords.
    pub fn from_keyword_ignore_case(text: &str) -> Option<Command> {
        Command::ALL
            .into_iter()
            .find(|c| c.keyword().eq_ignore_ascii_case(text))
    }

    /// Parameter schema of the statement form.
    pub fn params(self) -> &'static [ParamKind] {
        use ParamKind::*;
        match self {
            Command::Forward
            | Command::Backward
            | Command::TurnLeft
            | Command::TurnRight
            | Command::LookUp
            | Command::LookDown
            | Command::LookLeft
            | Command::LookRight => &[Number],
            Command::Perceive => &[],
            Command::Approach | Command::Grasp => &[Object],
            Command::GoTo => &[Number, Number],
        }
    }

    /// Motion commands whose single magnitude must be strictly positive.
    pub fn is_motion(self) -> bool {
        self.params() == [ParamKind::Number]
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Keyword(Command),
    Identifier,
    Number,
    Comma,
    Semicolon,
    /// Comment tokens are kept apart from the significant token stream.
    Comment,
    EndOfInput,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Verbatim source slice; empty only for `EndOfInput`.
    pub text: String,
    pub span: SourceSpan,
}

impl Token {
    pub fn is_statement_boundary(&self) -> bool {
        matches!(
            self.kind,
            TokenKind::Semicolon | TokenKind::Keyword(_) | TokenKind::EndOfInput
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LiteralError {
    #[error("`{0}` is not a valid number")]
    Number(String),
    #[error("`{0}` is not a valid object name")]
    Object(String),
}

/// Returns true when `raw` matches `-?[0-9]+(\.[0-9]+)?`.
pub(crate) fn is_number_lexeme(raw: &str) -> bool {
    let digits = raw.strip_prefix('-').unwrap_or(raw);
    let (int, frac) = match digits.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (digits, None),
    };
    let all_digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    all_digits(int) && frac.is_none_or(all_digits)
}

pub(crate) fn is_identifier(text: &str) -> bool {
    let mut chars = text.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A numeric literal. The raw text is kept so that re-rendering is exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Number {
    value: f64,
    raw: String,
}

impl Number {
    pub fn parse(raw: &str) -> Result<Number, LiteralError> {
        if !is_number_lexeme(raw) {
            return Err(LiteralError::Number(raw.to_owned()));
        }
        match raw.parse::<f64>() {
            Ok(value) if value.is_finite() => Ok(Number { value, raw: raw.to_owned() }),
            _ => Err(LiteralError::Number(raw.to_owned())),
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }
}

impl TryFrom<String> for Number {
    type Error = LiteralError;
    fn try_from(raw: String) -> Result<Self, Self::Error> {
        Number::parse(&raw)
    }
}

impl From<Number> for String {
    fn from(n: Number) -> String {
        n.raw
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.raw)
    }
}

/// Name of a world object, following the C identifier rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ObjectName(String);

impl ObjectName {
    pub fn new(name: &str) -> Result<ObjectName, LiteralError> {
        if is_identifier(name) {
            Ok(ObjectName(name.to_owned()))
        } else {
            Err(LiteralError::Object(name.to_owned()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for ObjectName {
    type Error = LiteralError;
    fn try_from(name: String) -> Result<Self, Self::Error> {
        ObjectName::new(&name)
    }
}

impl From<ObjectName> for String {
    fn from(n: ObjectName) -> String {
        n.0
    }
}

impl fmt::Display for ObjectName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One statement form per skill.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum StatementKind {
    Forward { distance: Number },
    Backward { distance: Number },
    TurnLeft { angle: Number },
    TurnRight { angle: Number },
    LookUp { angle: Number },
    LookDown { angle: Number },
    LookLeft { angle: Number },
    LookRight { angle: Number },
    Perceive,
    Approach { object: ObjectName },
    GoTo { x: Number, y: Number },
    Grasp { object: ObjectName },
}

impl StatementKind {
    pub fn command(&self) -> Command {
        match self {
            StatementKind::Forward { .. } => Command::Forward,
            StatementKind::Backward { .. } => Command::Backward,
            StatementKind::TurnLeft { .. } => Command::TurnLeft,
            StatementKind::TurnRight { .. } => Command::TurnRight,
            StatementKind::LookUp { .. } => Command::LookUp,
            StatementKind::LookDown { .. } => Command::LookDown,
            StatementKind::LookLeft { .. } => Command::LookLeft,
            StatementKind::LookRight { .. } => Command::LookRight,
            StatementKind::Perceive => Command::Perceive,
            StatementKind::Approach { .. } => Command::Approach,
            StatementKind::GoTo { .. } => Command::GoTo,
            StatementKind::Grasp { .. } => Command::Grasp,
        }
    }

    /// The single magnitude of a motion statement.
    pub fn magnitude(&self) -> Option<&Number> {
        match self {
            StatementKind::Forward { distance } | StatementKind::Backward { distance } => {
                Some(distance)
            }
            StatementKind::TurnLeft { angle }
            | StatementKind::TurnRight { angle }
            | StatementKind::LookUp { angle }
            | StatementKind::LookDown { angle }
            | StatementKind::LookLeft { angle }
            | StatementKind::LookRight { angle } => Some(angle),
            _ => None,
        }
    }

    pub fn object(&self) -> Option<&ObjectName> {
        match self {
            StatementKind::Approach { object } | StatementKind::Grasp { object } => Some(object),
            _ => None,
        }
    }

    /// Builds a statement for a command whose magnitude parameter is `n`.
    /// Returns `None` if `command` does not take exactly one number.
    pub fn motion(command: Command, n: Number) -> Option<StatementKind> {
        Some(match command {
            Command::Forward => StatementKind::Forward { distance: n },
            Command::Backward => StatementKind::Backward { distance: n },
            Command::TurnLeft => StatementKind::TurnLeft { angle: n },
            Command::TurnRight => StatementKind::TurnRight { angle: n },
            Command::LookUp => StatementKind::LookUp { angle: n },
            Command::LookDown => StatementKind::LookDown { angle: n },
            Command::LookLeft => StatementKind::LookLeft { angle: n },
            Command::LookRight => StatementKind::LookRight { angle: n },
            _ => return None,
        })
    }
}

/// Canonical concrete syntax: lowercase keyword, single spaces, trailing
/// semicolon.
pub fn render_statement(s: &StatementKind) -> String {
    let kw = s.command().keyword();
    match s {
        StatementKind::Perceive => format!("{kw};"),
        StatementKind::GoTo { x, y } => format!("{kw} {x}, {y};"),
        StatementKind::Approach { object } | StatementKind::Grasp { object } => {
            format!("{kw} {object};")
        }
        other => {
            let n = other.magnitude().expect("remaining forms carry a magnitude");
            format!("{kw} {n};")
        }
    }
}

impl fmt::Display for StatementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_statement(self))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statement {
    pub kind: StatementKind,
    /// From the keyword to the semicolon, clipped to the keyword's line.
    pub span: SourceSpan,
    /// One span per parameter, in order.
    pub arg_spans: Vec<SourceSpan>,
}

/// An ordered list of statements plus the source they came from.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Program {
    pub statements: Vec<Statement>,
    pub source: String,
}

impl Program {
    /// Builds a program from bare statements, rendering canonical source
    /// and assigning one line per statement.
    pub fn from_kinds(kinds: Vec<StatementKind>) -> Program {
        let mut source = String::new();
        let statements = kinds
            .into_iter()
            .enumerate()
            .map(|(i, kind)| {
                let text = render_statement(&kind);
                let width = text.chars().count() as u32;
                if i > 0 {
                    source.push('\n');
                }
                source.push_str(&text);
                let line = i as u32 + 1;
                let arg_spans = canonical_arg_spans(&kind, line);
                Statement { kind, span: SourceSpan::new(line, 1, width), arg_spans }
            })
            .collect();
        Program { statements, source }
    }

    pub fn kinds(&self) -> impl Iterator<Item = &StatementKind> {
        self.statements.iter().map(|s| &s.kind)
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    /// Canonical rendering, one statement per line.
    pub fn render(&self) -> String {
        self.kinds().map(render_statement).collect::<Vec<_>>().join("\n")
    }

    /// Structural equality ignoring spans and source text.
    pub fn same_statements(&self, other: &Program) -> bool {
        self.kinds().eq(other.kinds())
    }
}

fn canonical_arg_spans(kind: &StatementKind, line: u32) -> Vec<SourceSpan> {
    let mut col = kind.command().keyword().len() as u32 + 2;
    let args: Vec<String> = match kind {
        StatementKind::Perceive => vec![],
        StatementKind::GoTo { x, y } => vec![x.raw().to_owned(), y.raw().to_owned()],
        other => vec![other
            .magnitude()
            .map(|n| n.raw().to_owned())
            .or_else(|| other.object().map(|o| o.as_str().to_owned()))
            .expect("single-parameter form")],
    };
    args.iter()
        .map(|a| {
            let width = a.chars().count() as u32;
            let span = SourceSpan::new(line, col, col + width - 1);
            col += width + 2;
            span
        })
        .collect()
}
