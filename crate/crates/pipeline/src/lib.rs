//! Natural language to verified RSL.
//!
//! [`translate`] builds a prompt from a system message, optional shots and
//! a task, asks a model for a program, checks it with the RSL compiler and
//! feeds the diagnostics back until the program verifies or the pass
//! budget runs out. [`evaluate`] runs that loop over the shipped
//! benchmark and scores success, accuracy and passes.

pub mod benchmark;
pub mod eval;
pub mod extract;
pub mod prompt;
pub mod repair;
pub mod stubs;

pub use benchmark::{benchmark_tasks, benchmark_world, load_tasks, parse_tasks, DatasetError, Group, TaskRecord};
pub use eval::{evaluate, EvalError, EvalReport, TaskResult};
pub use extract::extract_rsl;
pub use prompt::{build_prompt, PromptError, PromptParts, Shot};
pub use repair::{translate, translate_with, LoopOutcome, PassRecord, TranslateError, DEFAULT_MAX_PASSES};
pub use stubs::{offline_client, FlakyStub, OracleStub};
