//! LL(1) parser and semantic validation.
//!
//! Grammar:
//!
//! ```text
//! program   := statement* EOF
//! statement := KEYWORD params ';'
//! params    := (param (',' param)*)?
//! param     := NUMBER | IDENTIFIER
//! ```
//!
//! A statement is selected by its keyword alone. Parameter kinds and
//! arity are checked against the keyword's schema after the parameter
//! region has been read, so a statement reports at most one of, in order:
//! `Command`, `Parameter`, `Quantity`, `Semicolon`. After an error the
//! parser resynchronizes on `;`, a keyword or end of input.

use std::ops::Deref;

use crate::diagnostics::{self, Category, Diagnostic};
use crate::lexer::{self, LexOutcome};
use crate::syntax::{
    Command, Number, ObjectName, ParamKind, Program, SourceSpan, Statement, StatementKind, Token,
    TokenKind,
};

#[derive(Debug, Clone, Default)]
pub struct ParseOutcome {
    /// Statements that parsed cleanly, in source order.
    pub program: Program,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseOutcome {
    pub fn is_verified(&self) -> bool {
        self.diagnostics.is_empty()
    }

    pub fn into_verified(self) -> Result<VerifiedProgram, ParseOutcome> {
        if self.is_verified() {
            Ok(VerifiedProgram(self.program))
        } else {
            Err(self)
        }
    }
}

/// A program known to produce zero diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifiedProgram(Program);

impl VerifiedProgram {
    /// Accepts a program built in memory if it passes validation.
    pub fn new(program: Program) -> Result<VerifiedProgram, Vec<Diagnostic>> {
        let diagnostics = validate(&program);
        if diagnostics.is_empty() {
            Ok(VerifiedProgram(program))
        } else {
            Err(diagnostics)
        }
    }

    pub fn program(&self) -> &Program {
        &self.0
    }

    pub fn into_program(self) -> Program {
        self.0
    }
}

impl Deref for VerifiedProgram {
    type Target = Program;
    fn deref(&self) -> &Program {
        &self.0
    }
}

/// Instrumentation collected while parsing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseStats {
    pub dispatches: usize,
    /// Largest number of tokens inspected to choose a production.
    pub max_dispatch_lookahead: usize,
    /// Times the cursor moved backwards.
    pub backtracks: usize,
}

/// Parses a token stream produced by [`lexer::lex`].
pub fn parse(source: &str, tokens: &[Token]) -> ParseOutcome {
    parse_with_stats(source, tokens).0
}

pub fn parse_with_stats(source: &str, tokens: &[Token]) -> (ParseOutcome, ParseStats) {
    let mut parser = Parser::new(source, tokens);
    let records = parser.program();
    let mut outcome = ParseOutcome { program: Program::default(), diagnostics: Vec::new() };
    outcome.program.source = source.to_owned();
    for rec in records {
        match rec.result {
            Ok(stmt) => outcome.program.statements.push(stmt),
            Err(d) => outcome.diagnostics.push(d),
        }
    }
    (outcome, parser.stats)
}

/// Emits a `Parameter` diagnostic for every motion magnitude that is not
/// strictly positive. `goto` coordinates may take any sign.
pub fn validate(program: &Program) -> Vec<Diagnostic> {
    program
        .statements
        .iter()
        .filter_map(|s| {
            let n = s.kind.magnitude()?;
            if n.value() > 0.0 {
                return None;
            }
            let span = s.arg_spans.first().copied().unwrap_or(s.span);
            Some(Diagnostic::new(Category::Parameter, span, n.raw()))
        })
        .collect()
}

/// Lex, parse and validate `source`. All diagnostics come back sorted by
/// position.
///
/// A lexeme dropped by the lexer already explains whatever is wrong with
/// its statement, so syntax errors of such statements are not repeated.
/// Miscased keywords are recovered and do not silence the statement.
pub fn check(source: &str) -> ParseOutcome {
    let lexed: LexOutcome = lexer::lex(source);
    let mut parser = Parser::new(source, &lexed.tokens);
    let records = parser.program();

    let dropped: Vec<(u32, u32)> = lexed
        .diagnostics
        .iter()
        .filter(|d| d.category != Category::Keyword)
        .map(|d| d.span.position())
        .collect();

    let mut program = Program { statements: Vec::new(), source: source.to_owned() };
    let mut diagnostics = lexed.diagnostics;
    for rec in records {
        match rec.result {
            Ok(stmt) => program.statements.push(stmt),
            Err(d) => {
                let covered = dropped.iter().any(|p| *p >= rec.start && *p < rec.end);
                if !covered {
                    diagnostics.push(d);
                }
            }
        }
    }
    diagnostics.extend(validate(&program));
    diagnostics::sort(&mut diagnostics);
    ParseOutcome { program, diagnostics }
}

struct Record {
    /// Position of the statement's first token.
    start: (u32, u32),
    /// Position of the first token after the statement.
    end: (u32, u32),
    result: Result<Statement, Diagnostic>,
}

struct Parser<'a> {
    source: SourceMap<'a>,
    tokens: &'a [Token],
    pos: usize,
    stats: ParseStats,
}

impl<'a> Parser<'a> {
    fn new(source: &'a str, tokens: &'a [Token]) -> Self {
        assert!(
            tokens.last().is_some_and(|t| t.kind == TokenKind::EndOfInput),
            "token stream must end with EndOfInput"
        );
        Parser { source: SourceMap::new(source), tokens, pos: 0, stats: ParseStats::default() }
    }

    fn peek(&self) -> &'a Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> &'a Token {
        let tok = &self.tokens[self.pos];
        if tok.kind != TokenKind::EndOfInput {
            self.pos += 1;
        }
        tok
    }

    fn program(&mut self) -> Vec<Record> {
        let mut records = Vec::new();
        loop {
            let lookahead = self.peek();
            self.stats.dispatches += 1;
            self.stats.max_dispatch_lookahead = self.stats.max_dispatch_lookahead.max(1);
            let start = lookahead.span.position();
            let result = match lookahead.kind {
                TokenKind::EndOfInput => break,
                TokenKind::Keyword(cmd) => self.statement(cmd),
                _ => Err(self.illegal_command()),
            };
            records.push(Record { start, end: self.peek().span.position(), result });
        }
        records
    }

    /// Leading token is not a keyword: report it and skip to the next
    /// synchronization point.
    fn illegal_command(&mut self) -> Diagnostic {
        let lead = self.advance();
        let d = Diagnostic::new(Category::Command, lead.span, &lead.text);
        if lead.kind != TokenKind::Semicolon {
            self.synchronize();
        }
        d
    }

    fn synchronize(&mut self) {
        while !self.peek().is_statement_boundary() {
            self.advance();
        }
        if self.peek().kind == TokenKind::Semicolon {
            self.advance();
        }
    }

    fn statement(&mut self, cmd: Command) -> Result<Statement, Diagnostic> {
        let keyword = self.advance();

        let mut region: Vec<&Token> = Vec::new();
        while matches!(
            self.peek().kind,
            TokenKind::Number | TokenKind::Identifier | TokenKind::Comma
        ) {
            region.push(self.advance());
        }
        let terminator = if self.peek().kind == TokenKind::Semicolon {
            Some(self.advance())
        } else {
            None
        };

        let mut groups: Vec<Vec<&Token>> = Vec::new();
        if !region.is_empty() {
            groups.push(Vec::new());
            for tok in &region {
                if tok.kind == TokenKind::Comma {
                    groups.push(Vec::new());
                } else {
                    groups.last_mut().expect("non-empty").push(tok);
                }
            }
        }

        let schema = cmd.params();
        let last_arg = region.last().copied().unwrap_or(keyword);
        let body = self.statement_span(keyword, last_arg);

        for (group, expected) in groups.iter().zip(schema) {
            if let [tok] = group.as_slice() {
                if param_kind(tok) != Some(*expected) {
                    return Err(Diagnostic::new(Category::Parameter, tok.span, &tok.text));
                }
            }
        }
        if groups.len() != schema.len() || groups.iter().any(|g| g.len() != 1) {
            return Err(Diagnostic::new(Category::Quantity, body, self.source.slice(body)));
        }
        let Some(terminator) = terminator else {
            return Err(Diagnostic::new(Category::Semicolon, body, self.source.slice(body)));
        };

        let args: Vec<&Token> = groups.iter().map(|g| g[0]).collect();
        let kind = build_statement(cmd, &args);
        Ok(Statement {
            kind,
            span: self.statement_span(keyword, terminator),
            arg_spans: args.iter().map(|t| t.span).collect(),
        })
    }

    /// Span from the keyword to `last`, clipped to the keyword's line.
    fn statement_span(&self, keyword: &Token, last: &Token) -> SourceSpan {
        let line = keyword.span.line;
        let col_end = self.tokens[..self.pos]
            .iter()
            .rev()
            .skip_while(|t| !std::ptr::eq(*t, last))
            .find(|t| t.span.line == line)
            .map_or(keyword.span.col_end, |t| t.span.col_end);
        SourceSpan::new(line, keyword.span.col_start, col_end.max(keyword.span.col_end))
    }
}

fn param_kind(tok: &Token) -> Option<ParamKind> {
    match tok.kind {
        TokenKind::Number => Some(ParamKind::Number),
        TokenKind::Identifier => Some(ParamKind::Object),
        _ => None,
    }
}

fn build_statement(cmd: Command, args: &[&Token]) -> StatementKind {
    let number = |i: usize| Number::parse(&args[i].text).expect("lexer only emits valid numbers");
    let object = |i: usize| ObjectName::new(&args[i].text).expect("lexer only emits valid identifiers");
    match cmd {
        Command::Perceive => StatementKind::Perceive,
        Command::Approach => StatementKind::Approach { object: object(0) },
        Command::Grasp => StatementKind::Grasp { object: object(0) },
        Command::GoTo => StatementKind::GoTo { x: number(0), y: number(1) },
        motion => StatementKind::motion(motion, number(0)).expect("remaining commands are motions"),
    }
}

/// Maps line/column spans back to source text.
pub struct SourceMap<'a> {
    src: &'a str,
    line_starts: Vec<usize>,
}

impl<'a> SourceMap<'a> {
    pub fn new(src: &'a str) -> Self {
        let mut line_starts = vec![0];
        line_starts.extend(src.match_indices('\n').map(|(i, _)| i + 1));
        SourceMap { src, line_starts }
    }

    /// Source text covered by `span`, or "" if the span lies outside it.
    pub fn slice(&self, span: SourceSpan) -> &'a str {
        let Some(&line_start) = self.line_starts.get(span.line as usize - 1) else {
            return "";
        };
        let line = &self.src[line_start..];
        let line = &line[..line.find('\n').unwrap_or(line.len())];
        let mut offsets = line.char_indices().map(|(i, _)| i).chain([line.len()]);
        let start = offsets.nth(span.col_start as usize - 1);
        let end = offsets.nth((span.col_end - span.col_start) as usize);
        match (start, end) {
            (Some(s), Some(e)) => &line[s..e],
            (Some(s), None) => &line[s..],
            _ => "",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn categories(src: &str) -> Vec<Category> {
        check(src).diagnostics.iter().map(|d| d.category).collect()
    }

    fn parse_only(src: &str) -> ParseOutcome {
        let lexed = lexer::lex(src);
        assert!(lexed.is_clean(), "{src}");
        parse(src, &lexed.tokens)
    }

    #[test]
    fn illegal_command() {
        let out = parse_only("move 1.5;");
        assert_eq!(out.diagnostics.len(), 1);
        let d = &out.diagnostics[0];
        assert_eq!(d.category, Category::Command);
        assert_eq!(d.token_text, "move");
        assert_eq!(d.message, "The command (keyword) is illegal.");
    }

    #[test]
    fn parameter_type_mismatch() {
        let out = parse_only("forward table;");
        assert_eq!(out.diagnostics.len(), 1);
        assert_eq!(out.diagnostics[0].category, Category::Parameter);
        assert_eq!(out.diagnostics[0].token_text, "table");
        assert_eq!(categories("grasp 3;"), vec![Category::Parameter]);
        assert_eq!(categories("goto 1, cup;"), vec![Category::Parameter]);
    }

    #[test]
    fn wrong_arity() {
        let out = parse_only("goto 1;");
        assert_eq!(out.diagnostics.len(), 1);
        assert_eq!(out.diagnostics[0].category, Category::Quantity);
        assert_eq!(out.diagnostics[0].token_text, "goto 1");
        for src in ["goto 1, 2, 3;", "perceive table;", "forward;", "forward 1 2;", "goto 1,;", "goto ,1, 2;"] {
            assert_eq!(categories(src), vec![Category::Quantity], "{src}");
        }
    }

    #[test]
    fn missing_semicolon() {
        let out = parse_only("approach table");
        assert_eq!(out.diagnostics.len(), 1);
        let d = &out.diagnostics[0];
        assert_eq!(d.category, Category::Semicolon);
        assert_eq!(d.token_text, "approach table");
        assert_eq!(d.span, SourceSpan::new(1, 1, 14));
        assert_eq!(
            d.render(),
            "Line 1: The statement must end with a semicolon. Near token 'approach table'."
        );
    }

    #[test]
    fn precedence_is_parameter_then_quantity_then_semicolon() {
        assert_eq!(categories("goto table"), vec![Category::Parameter]);
        assert_eq!(categories("goto 1"), vec![Category::Quantity]);
    }

    #[test]
    fn clean_program() {
        let out = parse_only("forward 2; turnleft 1.57; grasp cup;");
        assert!(out.is_verified());
        assert_eq!(out.program.len(), 3);
        assert_eq!(out.program.statements[1].kind.command(), Command::TurnLeft);
        assert_eq!(out.program.statements[1].span, SourceSpan::new(1, 12, 25));
    }

    #[test]
    fn recovery_reports_every_statement() {
        let src = "move 1;\nforward cup;\ngoto 1;\ngrasp cup\nperceive;";
        let out = check(src);
        let cats: Vec<_> = out.diagnostics.iter().map(|d| (d.line(), d.category)).collect();
        assert_eq!(
            cats,
            vec![
                (1, Category::Command),
                (2, Category::Parameter),
                (3, Category::Quantity),
                (4, Category::Semicolon)
            ]
        );
        assert_eq!(out.program.len(), 1);
        assert_eq!(out.program.statements[0].kind, StatementKind::Perceive);
    }

    #[test]
    fn stray_tokens_are_commands() {
        assert_eq!(categories(";"), vec![Category::Command]);
        assert_eq!(categories("1.5;"), vec![Category::Command]);
        assert_eq!(categories("forward 1;; perceive;"), vec![Category::Command]);
    }

    #[test]
    fn validate_positivity() {
        assert_eq!(categories("forward -1;"), vec![Category::Parameter]);
        assert_eq!(check("forward -1;").diagnostics[0].token_text, "-1");
        assert_eq!(check("forward -1;").diagnostics[0].span, SourceSpan::new(1, 9, 10));
        assert_eq!(categories("turnright 0;"), vec![Category::Parameter]);
        assert_eq!(categories("lookup 0.0;"), vec![Category::Parameter]);
        assert!(categories("goto -2, 0;").is_empty());
        assert!(categories("forward 5;").is_empty());
    }

    #[test]
    fn check_composes_lexical_and_syntactic() {
        assert_eq!(categories("APPROACH table"), vec![Category::Keyword, Category::Semicolon]);
        assert_eq!(categories("APPROACH table;"), vec![Category::Keyword]);
        assert_eq!(categories("approach 3apple;"), vec![Category::Identifier]);
        assert_eq!(categories("forward 123.23.45;"), vec![Category::Number]);
        assert_eq!(categories("$forward 1;"), vec![Category::Character]);
        assert_eq!(categories("/ This is a comment"), vec![Category::Comment]);
    }

    #[test]
    fn check_verifies_simple_programs() {
        let out = check("perceive;");
        assert!(out.is_verified());
        assert_eq!(out.program.len(), 1);
        let out = check("grasp cup; backward 3;");
        assert!(out.is_verified());
        assert_eq!(out.program.len(), 2);
        assert!(check("").is_verified());
    }

    #[test]
    fn multiline_statements() {
        let out = check("goto 1,\n  2;");
        assert!(out.is_verified());
        assert_eq!(out.program.statements[0].span, SourceSpan::new(1, 1, 7));
        let out = check("approach\ntable");
        assert_eq!(out.diagnostics[0].token_text, "approach");
    }

    #[test]
    fn stats_show_single_lookahead() {
        let src = "move 1; forward 2; goto 1;";
        let lexed = lexer::lex(src);
        let (_, stats) = parse_with_stats(src, &lexed.tokens);
        assert_eq!(stats.dispatches, 4);
        assert_eq!(stats.max_dispatch_lookahead, 1);
        assert_eq!(stats.backtracks, 0);
    }

    #[test]
    fn verified_program_rejects_nonpositive() {
        let p = Program::from_kinds(vec![StatementKind::Backward {
            distance: Number::parse("0").unwrap(),
        }]);
        assert_eq!(VerifiedProgram::new(p).unwrap_err()[0].category, Category::Parameter);
    }

    #[test]
    fn source_map_slices_by_chars() {
        let map = SourceMap::new("ab\nçd ef");
        assert_eq!(map.slice(SourceSpan::new(2, 1, 2)), "çd");
        assert_eq!(map.slice(SourceSpan::new(2, 4, 5)), "ef");
        assert_eq!(map.slice(SourceSpan::new(9, 1, 1)), "");
    }
}
