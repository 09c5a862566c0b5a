//! Compiler and simulator for the Robot Skill Language (RSL).
//!
//! RSL is a command language of twelve robot skills. A program is a
//! sequence of statements, each one keyword, its parameters and a
//! terminating semicolon:
//!
//! ```text
//! approach table;
//! grasp cup;
//! goto 0, 0;
//! ```
//!
//! The pipeline is [`lexer::lex`] → [`parser::parse`] → [`parser::validate`],
//! composed by [`check`]. A clean check yields a [`VerifiedProgram`] that
//! [`codegen::generate`] turns into control source and [`sim::run`] executes
//! against a 2D world.

pub mod codegen;
pub mod diagnostics;
pub mod lexer;
pub mod parser;
pub mod sim;
pub mod syntax;

pub use diagnostics::{Category, Diagnostic};
pub use parser::{check, ParseOutcome, VerifiedProgram};
pub use syntax::{Command, Number, ObjectName, Program, SourceSpan, Statement, StatementKind};
