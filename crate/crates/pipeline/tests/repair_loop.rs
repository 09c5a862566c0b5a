use std::sync::Arc;

use rsl_core::diagnostics::{TechnicalRenderer, Renderer};
use rsl_core::{check, Category};
use rsl_llm::{ChatClient, LlmError, Role, ScriptedReply, ScriptedTransport};
use rsl_pipeline::repair::EMPTY_PROGRAM_FEEDBACK;
use rsl_pipeline::{build_prompt, translate, translate_with, PromptParts, TranslateError};

fn scripted(replies: &[&str]) -> (Arc<ScriptedTransport>, ChatClient) {
    let t = Arc::new(ScriptedTransport::new(replies.iter().copied()));
    (t.clone(), ChatClient::scripted(t))
}

fn parts(task: &str) -> PromptParts {
    PromptParts::default_template().with_task(task)
}

#[test]
fn missing_semicolon_is_repaired_on_pass_two() {
    let (t, client) = scripted(&["approach table", "approach table;"]);
    let out = translate(&parts("Approach the table."), &client, 5).unwrap();
    assert!(out.verified);
    assert_eq!(out.passes, 2);
    assert_eq!(out.raw_history.len(), 2);
    let cats: Vec<_> = out.raw_history[0].diagnostics.iter().map(|d| d.category).collect();
    assert_eq!(cats, [Category::Semicolon]);
    assert!(out.last_diagnostics().is_empty());

    let requests = t.requests();
    assert_eq!(requests.len(), 2);
    let feedback = &requests[1].last().unwrap().content;
    let line = out.raw_history[0].diagnostics[0].render();
    assert_eq!(line, "Line 1: The statement must end with a semicolon. Near token 'approach table'.");
    assert_eq!(feedback.matches(&line).count(), 1);
    assert!(feedback.contains("approach table"));
}

#[test]
fn first_pass_success() {
    let (t, client) = scripted(&["forward 1;"]);
    let out = translate(&parts("Move forward 1 meter."), &client, 5).unwrap();
    assert!(out.verified);
    assert_eq!(out.passes, 1);
    assert_eq!(t.request_count(), 1);
    assert_eq!(out.program.unwrap().render(), "forward 1;");
}

#[test]
fn exhaustion_keeps_last_diagnostics() {
    let (t, client) = scripted(&["move 1;", "move 1;", "move 1;", "forward 1;"]);
    let out = translate(&parts("Move."), &client, 3).unwrap();
    assert!(!out.verified);
    assert!(out.program.is_none());
    assert_eq!(out.passes, 3);
    assert_eq!(t.request_count(), 3);
    let cats: Vec<_> = out.last_diagnostics().iter().map(|d| d.category).collect();
    assert_eq!(cats, [Category::Command]);
}

#[test]
fn transcript_grows_and_feedback_is_faithful() {
    let replies = ["Sure:\n```\nforward 1\nAPPROACH table;\n```", "```\nforward 1;\nmove 2;\n```", "forward 1;\napproach table;"];
    let (t, client) = scripted(&replies);
    let p = parts("Go forward then approach the table.");
    let out = translate(&p, &client, 5).unwrap();
    assert!(out.verified);
    assert_eq!(out.passes, 3);

    let prompt = build_prompt(&p).unwrap();
    let requests = t.requests();
    assert_eq!(requests[0], prompt);
    for k in 1..requests.len() {
        // Each request extends the previous one by exactly the reply and one feedback message.
        assert_eq!(requests[k][..requests[k - 1].len()], requests[k - 1][..]);
        assert_eq!(requests[k].len(), requests[k - 1].len() + 2);
        assert_eq!(requests[k][requests[k].len() - 2].role, Role::Assistant);
        let feedback = &requests[k].last().unwrap().content;
        for d in &out.raw_history[k - 1].diagnostics {
            assert_eq!(feedback.matches(&d.render()).count(), 1, "{feedback}");
        }
    }
    assert_eq!(out.transcript.len(), requests.last().unwrap().len() + 1);
    assert_eq!(out.transcript[..requests[2].len()], requests[2][..]);

    let program = out.program.unwrap();
    assert!(check(&program.render()).diagnostics.is_empty());
}

#[test]
fn zero_shot_runs_the_same_loop() {
    let replies = ["approach table", "approach table;"];
    let (_, with_shots) = scripted(&replies);
    let (t, zero) = scripted(&replies);
    let a = translate(&parts("Approach the table."), &with_shots, 5).unwrap();
    let b = translate(&PromptParts::zero_shot_template().with_task("Approach the table."), &zero, 5).unwrap();
    assert_eq!(a.verified, b.verified);
    assert_eq!(a.passes, b.passes);
    assert_eq!(a.raw_history, b.raw_history);
    assert_eq!(t.requests()[0].len(), 2);
}

#[test]
fn empty_reply_gets_fixed_feedback() {
    let (t, client) = scripted(&["Let me think about it.\n// nothing yet", "```\n```", "perceive;"]);
    let out = translate(&parts("Look around."), &client, 5).unwrap();
    assert!(out.verified);
    assert_eq!(out.passes, 3);
    assert_eq!(out.raw_history[1].extracted, "");
    assert!(out.raw_history[1].diagnostics.is_empty());
    assert_eq!(t.requests()[2].last().unwrap().content, EMPTY_PROGRAM_FEEDBACK);
}

#[test]
fn llm_errors_carry_the_pass_number() {
    let t = Arc::new(ScriptedTransport::from_replies([
        ScriptedReply::Text("forward 1".into()),
        ScriptedReply::AuthFailure,
    ]));
    let err = translate(&parts("Go."), &ChatClient::scripted(t), 5).unwrap_err();
    match &err {
        TranslateError::Llm { pass: 2, source: LlmError::Auth(_), history } => assert_eq!(history.len(), 1),
        other => panic!("{other:?}"),
    }
    assert!(err.to_string().starts_with("pass 2:"));

    let (_, client) = scripted(&["forward 1"]);
    let err = translate(&parts("Go."), &client, 3).unwrap_err();
    assert!(matches!(err, TranslateError::Llm { pass: 2, source: LlmError::Transport { .. }, .. }));
}

#[test]
fn bad_arguments() {
    let (_, client) = scripted(&["forward 1;"]);
    assert!(matches!(translate(&parts("Go."), &client, 0), Err(TranslateError::ZeroPasses)));
    assert!(matches!(translate(&parts(""), &client, 1), Err(TranslateError::Prompt(_))));
}

#[test]
fn renderer_is_pluggable() {
    let (t, client) = scripted(&["approach table", "approach table;"]);
    let out = translate_with(&TechnicalRenderer, &parts("Approach the table."), &client, 5).unwrap();
    let expected = TechnicalRenderer.render(&out.raw_history[0].diagnostics[0]);
    assert!(t.requests()[1].last().unwrap().content.contains(&expected));
}

#[test]
fn transcript_exports_as_json() {
    let (_, client) = scripted(&["approach table", "approach table;"]);
    let out = translate(&parts("Approach the table."), &client, 5).unwrap();
    let json = out.to_json();
    assert_eq!(json["passes"], 2);
    assert_eq!(json["program"], "approach table;");
    assert_eq!(json["history"][0]["diagnostics"][0]["category"], "Semicolon");
    assert_eq!(json["transcript"].as_array().unwrap().len(), out.transcript.len());
}
