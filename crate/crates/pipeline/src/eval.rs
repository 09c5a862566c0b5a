//! Runs the repair loop over a task set and scores the results.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rsl_core::sim::{evaluate_accuracy, run, RobotState, World};
use rsl_core::VerifiedProgram;
use rsl_llm::ChatClient;
use serde::Serialize;

use crate::benchmark::{Group, TaskRecord};
use crate::prompt::PromptParts;
use crate::repair::{translate, PassRecord, TranslateError};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskResult {
    pub id: String,
    pub group: Group,
    pub success: bool,
    pub accurate: bool,
    pub passes: u32,
    /// Rendered diagnostics of each pass, in order.
    pub diagnostics_history: Vec<Vec<String>>,
    pub program: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub tasks: usize,
    pub successes: usize,
    pub accurate: usize,
    pub success_rate: f64,
    pub accuracy: f64,
    pub mean_pass: f64,
    pub max_passes: u32,
    pub per_task: Vec<TaskResult>,
}

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("no tasks to evaluate")]
    NoTasks,
    #[error("max_passes must be at least 1")]
    ZeroPasses,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    id: &'a str,
    group: &'a str,
    success: bool,
    accurate: bool,
    passes: u32,
}

impl EvalReport {
    fn from_results(mut per_task: Vec<TaskResult>, max_passes: u32) -> EvalReport {
        per_task.sort_by(|a, b| a.id.cmp(&b.id));
        let tasks = per_task.len();
        let successes = per_task.iter().filter(|r| r.success).count();
        let accurate = per_task.iter().filter(|r| r.accurate).count();
        let total_passes: u64 = per_task.iter().map(|r| u64::from(r.passes)).sum();
        EvalReport {
            tasks,
            successes,
            accurate,
            success_rate: successes as f64 / tasks as f64,
            accuracy: accurate as f64 / tasks as f64,
            mean_pass: total_passes as f64 / tasks as f64,
            max_passes,
            per_task,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Columns id, group, success, accurate, passes.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.per_task {
            w.serialize(CsvRow {
                id: &r.id,
                group: r.group.as_str(),
                success: r.success,
                accurate: r.accurate,
                passes: r.passes,
            })
            .expect("in-memory csv write");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
    }

    /// `success 25/25, accuracy 21/25, mean pass 1.16`
    pub fn summary(&self) -> String {
        format!(
            "success {}/{}, accuracy {}/{}, mean pass {:.2}",
            self.successes, self.tasks, self.accurate, self.tasks, self.mean_pass
        )
    }
}

fn rendered(history: &[PassRecord]) -> Vec<Vec<String>> {
    history.iter().map(|p| p.diagnostics.iter().map(|d| d.render()).collect()).collect()
}

fn evaluate_one(
    task: &TaskRecord,
    client: &ChatClient,
    template: &PromptParts,
    world: &World,
    max_passes: u32,
) -> TaskResult {
    let mut result = TaskResult {
        id: task.id.clone(),
        group: task.group,
        success: false,
        accurate: false,
        passes: max_passes,
        diagnostics_history: Vec::new(),
        program: None,
        error: None,
    };
    match translate(&template.with_task(task.text.clone()), client, max_passes) {
        Ok(outcome) => {
            result.passes = outcome.passes;
            result.diagnostics_history = rendered(&outcome.raw_history);
            if let Some(program) = outcome.program.filter(|_| outcome.verified) {
                result.program = Some(program.render());
                match VerifiedProgram::new(program) {
                    Ok(verified) => {
                        result.success = true;
                        let run = run(&verified, world, RobotState::default());
                        if let Err(f) = &run {
                            result.error = Some(f.to_string());
                        }
                        result.accurate = evaluate_accuracy(&run, &task.expectation);
                    }
                    Err(diags) => result.error = diags.first().map(|d| d.render()),
                }
            }
        }
        Err(TranslateError::Llm { pass, source, history }) => {
            tracing::warn!(task = %task.id, pass, error = %source, "translation failed");
            result.diagnostics_history = rendered(&history);
            result.error = Some(format!("pass {pass}: {source}"));
        }
        Err(e) => result.error = Some(e.to_string()),
    }
    result
}

/// Translates, verifies and simulates every task. Up to `parallelism`
/// tasks run at once; the report is ordered by task id regardless.
pub fn evaluate(
    tasks: &[TaskRecord],
    client: &ChatClient,
    template: &PromptParts,
    world: &World,
    max_passes: u32,
    parallelism: usize,
) -> Result<EvalReport, EvalError> {
    if tasks.is_empty() {
        return Err(EvalError::NoTasks);
    }
    if max_passes == 0 {
        return Err(EvalError::ZeroPasses);
    }
    let workers = parallelism.clamp(1, tasks.len());
    let next = AtomicUsize::new(0);
    let results = Mutex::new(Vec::with_capacity(tasks.len()));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(task) = tasks.get(i) else { break };
                let r = evaluate_one(task, client, template, world, max_passes);
                results.lock().expect("results lock").push(r);
            });
        }
    });
    Ok(EvalReport::from_results(results.into_inner().expect("results lock"), max_passes))
}
