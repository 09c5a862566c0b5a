//! Hand-written scanner for RSL source.
//!
//! Lexeme rules:
//!
//! - identifier: `[A-Za-z_][A-Za-z0-9_]*`; an exact lowercase keyword
//!   spelling is a keyword, a miscased one is a `Keyword` diagnostic
//! - number: `-?[0-9]+(\.[0-9]+)?`
//! - delimiters: `,` and `;`
//! - comments: `// ...` to end of line and `/* ... */`
//! - whitespace: space, tab, CR, LF
//!
//! The lexer never stops early. A malformed lexeme becomes one diagnostic
//! and scanning resumes after it. The one exception is a miscased keyword:
//! it is reported and still emitted as the keyword, so the statement keeps
//! parsing.

use std::ops::Range;

use crate::diagnostics::{Category, Diagnostic};
use crate::syntax::{is_number_lexeme, Command, SourceSpan, Token, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PieceKind {
    Token,
    Comment,
    Whitespace,
    Diagnostic,
}

/// A contiguous byte range of the source and what consumed it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub range: Range<usize>,
    pub kind: PieceKind,
}

#[derive(Debug, Clone, Default)]
pub struct LexOutcome {
    /// Significant tokens, always terminated by `EndOfInput`.
    pub tokens: Vec<Token>,
    /// Well-formed comments, as `TokenKind::Comment` tokens.
    pub comments: Vec<Token>,
    /// Lexical diagnostics in source order.
    pub diagnostics: Vec<Diagnostic>,
    /// Partition of the source into consumed pieces, in order.
    pub pieces: Vec<Piece>,
}

impl LexOutcome {
    pub fn is_clean(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

pub fn lex(source: &str) -> LexOutcome {
    Lexer::new(source).run()
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    col: u32,
    out: LexOutcome,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0, line: 1, col: 1, out: LexOutcome::default() }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_second(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn bump_while(&mut self, pred: impl Fn(char) -> bool) {
        while self.peek().is_some_and(&pred) {
            self.bump();
        }
    }

    fn run(mut self) -> LexOutcome {
        while let Some(c) = self.peek() {
            let start = self.pos;
            let (line, col) = (self.line, self.col);
            match c {
                ' ' | '\t' | '\r' | '\n' => {
                    self.bump_while(|c| matches!(c, ' ' | '\t' | '\r' | '\n'));
                    self.piece(start, PieceKind::Whitespace);
                }
                ',' | ';' => {
                    self.bump();
                    let kind = if c == ',' { TokenKind::Comma } else { TokenKind::Semicolon };
                    self.token(kind, start, line, col);
                }
                '/' => self.comment(start, line, col),
                c if is_ident_start(c) => self.word(start, line, col),
                c if c.is_ascii_digit() => self.numeric(start, line, col),
                '-' if self.peek_second().is_some_and(|c| c.is_ascii_digit()) => {
                    self.bump();
                    self.numeric(start, line, col);
                }
                _ => {
                    self.bump();
                    self.error(Category::Character, start, line, col);
                }
            }
        }
        let eof = SourceSpan::new(self.line, self.col, self.col);
        self.out.tokens.push(Token { kind: TokenKind::EndOfInput, text: String::new(), span: eof });
        self.out
    }

    fn word(&mut self, start: usize, line: u32, col: u32) {
        self.bump_while(is_ident_continue);
        let text = &self.src[start..self.pos];
        if let Some(cmd) = Command::from_keyword(text) {
            self.token(TokenKind::Keyword(cmd), start, line, col);
        } else if let Some(cmd) = Command::from_keyword_ignore_case(text) {
            self.diagnostic(Category::Keyword, start, line, col);
            self.token(TokenKind::Keyword(cmd), start, line, col);
        } else {
            self.token(TokenKind::Identifier, start, line, col);
        }
    }

    /// Number-led run. The whole run `[A-Za-z0-9_.]*` is one lexeme so
    /// that `123.23.45` and `3apple` each produce a single diagnostic.
    fn numeric(&mut self, start: usize, line: u32, col: u32) {
        self.bump_while(|c| is_ident_continue(c) || c == '.');
        let text = &self.src[start..self.pos];
        if is_number_lexeme(text) {
            match text.parse::<f64>() {
                Ok(v) if v.is_finite() => self.token(TokenKind::Number, start, line, col),
                _ => self.error(Category::Number, start, line, col),
            }
        } else if text.contains('.') || looks_like_exponent(text) {
            self.error(Category::Number, start, line, col);
        } else {
            self.error(Category::Identifier, start, line, col);
        }
    }

    fn comment(&mut self, start: usize, line: u32, col: u32) {
        self.bump();
        match self.peek() {
            Some('/') => {
                self.bump_while(|c| c != '\n');
                self.comment_token(start, line, col);
            }
            Some('*') => {
                self.bump();
                let first_line_end = self.line_end(start);
                loop {
                    match self.bump() {
                        Some('*') if self.peek() == Some('/') => {
                            self.bump();
                            self.comment_token(start, line, col);
                            return;
                        }
                        Some(_) => {}
                        None => {
                            // Unterminated: the diagnostic names the opening line only.
                            self.diagnostic_range(Category::Comment, start, first_line_end, line, col);
                            self.piece(start, PieceKind::Diagnostic);
                            return;
                        }
                    }
                }
            }
            _ => {
                // A lone slash reads as a broken line comment.
                self.bump_while(|c| c != '\n');
                let end = self.trim_cr(start);
                self.diagnostic_range(Category::Comment, start, end, line, col);
                self.piece(start, PieceKind::Diagnostic);
            }
        }
    }

    fn line_end(&self, from: usize) -> usize {
        let rest = &self.src[from..];
        let end = from + rest.find('\n').unwrap_or(rest.len());
        if self.src[from..end].ends_with('\r') && end - 1 > from {
            end - 1
        } else {
            end
        }
    }

    fn trim_cr(&self, start: usize) -> usize {
        if self.src[start..self.pos].ends_with('\r') && self.pos - 1 > start {
            self.pos - 1
        } else {
            self.pos
        }
    }

    fn span(&self, start: usize, end: usize, line: u32, col: u32) -> SourceSpan {
        let width = self.src[start..end].chars().count().max(1) as u32;
        SourceSpan::new(line, col, col + width - 1)
    }

    fn token(&mut self, kind: TokenKind, start: usize, line: u32, col: u32) {
        let span = self.span(start, self.pos, line, col);
        let text = self.src[start..self.pos].to_owned();
        self.out.tokens.push(Token { kind, text, span });
        self.piece(start, PieceKind::Token);
    }

    fn comment_token(&mut self, start: usize, line: u32, col: u32) {
        let end = self.trim_cr(start);
        let span = self.span(start, end, line, col);
        let text = self.src[start..self.pos].to_owned();
        self.out.comments.push(Token { kind: TokenKind::Comment, text, span });
        self.piece(start, PieceKind::Comment);
    }

    fn diagnostic(&mut self, category: Category, start: usize, line: u32, col: u32) {
        self.diagnostic_range(category, start, self.pos, line, col);
    }

    fn diagnostic_range(&mut self, category: Category, start: usize, end: usize, line: u32, col: u32) {
        let span = self.span(start, end, line, col);
        self.out
            .diagnostics
            .push(Diagnostic::new(category, span, &self.src[start..end]));
    }

    /// Diagnostic whose lexeme is dropped from the token stream.
    fn error(&mut self, category: Category, start: usize, line: u32, col: u32) {
        self.diagnostic(category, start, line, col);
        self.piece(start, PieceKind::Diagnostic);
    }

    fn piece(&mut self, start: usize, kind: PieceKind) {
        self.out.pieces.push(Piece { range: start..self.pos, kind });
    }
}

/// `1e3`, `2E10`: digits, an exponent marker, digits.
fn looks_like_exponent(text: &str) -> bool {
    let digits = text.strip_prefix('-').unwrap_or(text);
    match digits.find(['e', 'E']) {
        Some(i) => {
            let (mantissa, exp) = (&digits[..i], &digits[i + 1..]);
            !mantissa.is_empty()
                && mantissa.bytes().all(|b| b.is_ascii_digit())
                && !exp.is_empty()
                && exp.bytes().all(|b| b.is_ascii_digit())
        }
        None => false,
    }
}
