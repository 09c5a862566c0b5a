use std::collections::BTreeMap;
use std::sync::Arc;

use rsl_llm::{ScriptedReply, ScriptedTransport};
use rsl_pipeline::{benchmark_tasks, benchmark_world, evaluate, offline_client, EvalError, FlakyStub, OracleStub, PromptParts};

fn template() -> PromptParts {
    PromptParts::default_template()
}

#[test]
fn oracle_stub_scores_full_marks() {
    let client = offline_client("oracle", Arc::new(OracleStub::benchmark()));
    let report = evaluate(&benchmark_tasks(), &client, &template(), &benchmark_world(), 5, 4).unwrap();
    let failing: Vec<_> = report.per_task.iter().filter(|r| !r.accurate).map(|r| (&r.id, &r.error)).collect();
    assert!(failing.is_empty(), "{failing:?}");
    assert_eq!((report.successes, report.accurate, report.tasks), (25, 25, 25));
    assert_eq!(report.success_rate, 1.0);
    assert_eq!(report.accuracy, 1.0);
    assert_eq!(report.mean_pass, 1.0);
}

#[test]
fn flaky_stub_needs_feedback() {
    let client = offline_client("flaky", Arc::new(FlakyStub::benchmark()));
    let tasks = benchmark_tasks();
    let one = evaluate(&tasks, &client, &template(), &benchmark_world(), 1, 4).unwrap();
    assert_eq!(one.successes, 0);
    assert!(one.per_task.iter().all(|r| r.passes == 1));
    let two = evaluate(&tasks, &client, &template(), &benchmark_world(), 2, 4).unwrap();
    assert_eq!(two.successes, 25);
    assert_eq!(two.accurate, 25);
    assert_eq!(two.mean_pass, 2.0);
    assert!(two.per_task.iter().all(|r| r.diagnostics_history.len() == 2 && r.diagnostics_history[0].len() == 1));
}

#[test]
fn reports_are_deterministic_across_parallelism() {
    let client = offline_client("flaky", Arc::new(FlakyStub::benchmark()));
    let tasks = benchmark_tasks();
    let a = evaluate(&tasks, &client, &template(), &benchmark_world(), 3, 1).unwrap();
    let b = evaluate(&tasks, &client, &template(), &benchmark_world(), 3, 8).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.to_csv(), b.to_csv());
}

#[test]
fn csv_has_one_row_per_task() {
    let client = offline_client("oracle", Arc::new(OracleStub::benchmark()));
    let report = evaluate(&benchmark_tasks(), &client, &template(), &benchmark_world(), 5, 2).unwrap();
    let csv = report.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("id,group,success,accurate,passes"));
    assert_eq!(lines.next(), Some("t01,simple,true,true,1"));
    assert_eq!(csv.lines().count(), 26);
}

#[test]
fn wrong_programs_verify_but_are_inaccurate() {
    // Every task answered with a valid program for a different task.
    let tasks = benchmark_tasks();
    let oracle = OracleStub::benchmark();
    let shifted: BTreeMap<String, String> = tasks
        .iter()
        .zip(tasks.iter().cycle().skip(1))
        .map(|(t, next)| (t.text.clone(), oracle.program_for(&next.text).unwrap().to_owned()))
        .collect();
    let client = offline_client("shifted", Arc::new(OracleStub::new(shifted)));
    let report = evaluate(&tasks, &client, &template(), &benchmark_world(), 5, 4).unwrap();
    assert_eq!(report.successes, 25);
    assert!(report.accurate < 5, "{}", report.summary());
    assert!(report.per_task.iter().all(|r| !r.accurate || r.success));
}

#[test]
fn transport_failures_count_as_failed_tasks() {
    let tasks = benchmark_tasks();
    let mut replies = vec![ScriptedReply::Timeout; 3];
    replies.extend(std::iter::repeat_n(ScriptedReply::Text("perceive;".into()), 22));
    let client = rsl_llm::ChatClient::scripted(Arc::new(ScriptedTransport::from_replies(replies)));
    let report = evaluate(&tasks, &client, &template(), &benchmark_world(), 4, 1).unwrap();
    assert_eq!(report.successes, 22);
    let failed: Vec<_> = report.per_task.iter().filter(|r| !r.success).collect();
    assert_eq!(failed.len(), 3);
    assert!(failed.iter().all(|r| r.passes == 4 && r.error.is_some()));
    assert_eq!(report.mean_pass, (22.0 + 12.0) / 25.0);
}

#[test]
fn rejects_degenerate_input() {
    let client = offline_client("oracle", Arc::new(OracleStub::benchmark()));
    assert!(matches!(evaluate(&[], &client, &template(), &benchmark_world(), 5, 1), Err(EvalError::NoTasks)));
    assert!(matches!(
        evaluate(&benchmark_tasks(), &client, &template(), &benchmark_world(), 0, 1),
        Err(EvalError::ZeroPasses)
    ));
}
