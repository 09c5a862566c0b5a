//! The shipped 25-task benchmark and its world.

use std::collections::HashSet;
use std::path::Path;

use rsl_core::sim::{ExpectationError, TaskExpectation, World};
use serde::{Deserialize, Serialize};

pub const BENCHMARK_TASKS: &str = include_str!("../data/benchmark_tasks.json");
pub const BENCHMARK_WORLD: &str = include_str!("../data/benchmark_world.json");
/// Hand-checked RSL answer for every benchmark task text.
pub const ORACLE_PROGRAMS: &str = include_str!("../data/oracle_programs.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Simple,
    Ambiguous,
    MultiStep,
    Complex,
}

impl Group {
    pub const ALL: [Group; 4] = [Group::Simple, Group::Ambiguous, Group::MultiStep, Group::Complex];

    /// Number of tasks of this group in a well-formed dataset.
    pub fn expected_size(self) -> usize {
        match self {
            Group::Simple => 6,
            Group::Ambiguous => 4,
            Group::MultiStep => 6,
            Group::Complex => 9,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Group::Simple => "simple",
            Group::Ambiguous => "ambiguous",
            Group::MultiStep => "multi_step",
            Group::Complex => "complex",
        }
    }
}

pub const TASK_COUNT: usize = 25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskRecord {
    pub id: String,
    pub group: Group,
    pub text: String,
    pub expectation: TaskExpectation,
}

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed dataset: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("expected {expected} tasks, found {found}")]
    CountMismatch { expected: usize, found: usize },
    #[error("group {group} should have {expected} tasks, found {found}")]
    GroupCount { group: &'static str, expected: usize, found: usize },
    #[error("duplicate task id `{0}`")]
    DuplicateId(String),
    #[error("task `{0}` has an empty id or text")]
    EmptyField(String),
    #[error("task `{id}`: {source}")]
    Expectation { id: String, source: ExpectationError },
}

pub fn parse_tasks(text: &str) -> Result<Vec<TaskRecord>, DatasetError> {
    let tasks: Vec<TaskRecord> = serde_json::from_str(text)?;
    if tasks.len() != TASK_COUNT {
        return Err(DatasetError::CountMismatch { expected: TASK_COUNT, found: tasks.len() });
    }
    let mut ids = HashSet::new();
    for t in &tasks {
        if t.id.trim().is_empty() || t.text.trim().is_empty() {
            return Err(DatasetError::EmptyField(t.id.clone()));
        }
        if !ids.insert(t.id.as_str()) {
            return Err(DatasetError::DuplicateId(t.id.clone()));
        }
        t.expectation
            .validate()
            .map_err(|source| DatasetError::Expectation { id: t.id.clone(), source })?;
    }
    for g in Group::ALL {
        let found = tasks.iter().filter(|t| t.group == g).count();
        if found != g.expected_size() {
            return Err(DatasetError::GroupCount { group: g.as_str(), expected: g.expected_size(), found });
        }
    }
    Ok(tasks)
}

pub fn load_tasks(path: impl AsRef<Path>) -> Result<Vec<TaskRecord>, DatasetError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| DatasetError::Io { path: path.display().to_string(), source })?;
    parse_tasks(&text)
}

pub fn benchmark_tasks() -> Vec<TaskRecord> {
    parse_tasks(BENCHMARK_TASKS).expect("shipped dataset is valid")
}

pub fn benchmark_world() -> World {
    World::from_json(BENCHMARK_WORLD).expect("shipped world is valid")
}
