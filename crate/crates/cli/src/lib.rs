//! The `rsl` command line.
//!
//! Exit codes are shared by every subcommand: 0 on success, 1 when the
//! input was processed but failed (diagnostics, a simulator error, an
//! exhausted repair loop), 2 for unusable input or configuration, 3 when
//! the model endpoint could not be used.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rsl_core::codegen::{generate, load_manifest, SkillManifest};
use rsl_core::sim::{run as simulate, RobotState, World};
use rsl_core::{check, Diagnostic, VerifiedProgram};
use rsl_llm::{ApiKey, ChatClient, LlmError, ModelConfig, ScriptedTransport};
use rsl_pipeline::{
    benchmark_tasks, benchmark_world, evaluate, load_tasks, offline_client, translate, FlakyStub,
    OracleStub, PromptParts, TranslateError, DEFAULT_MAX_PASSES,
};
use serde_json::json;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    Failure = 1,
    Input = 2,
    Transport = 3,
}

#[derive(Debug, Parser)]
#[command(name = "rsl", version, about = "Robot Skill Language compiler, simulator and translator")]
pub struct Cli {
    /// Machine-readable output on stdout.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report diagnostics for an RSL source file.
    Check { source: PathBuf },
    /// Compile an RSL source file to control code.
    Compile {
        source: PathBuf,
        /// Skill manifest (JSON). Defaults to the built-in one.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Output path. Defaults to the source path with a .py extension.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Execute an RSL source file in the simulator.
    Run {
        source: PathBuf,
        /// World file (JSON). Defaults to the benchmark world.
        #[arg(long)]
        world: Option<PathBuf>,
        /// Trace output. Defaults to <source>.trace.jsonl.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Translate a natural-language task into a verified RSL program.
    Translate {
        task: String,
        #[command(flatten)]
        model: ModelArgs,
        /// Also compile the verified program to this path.
        #[arg(long, value_name = "PATH")]
        compile: Option<PathBuf>,
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Write the full exchange as JSON.
        #[arg(long, value_name = "PATH")]
        transcript: Option<PathBuf>,
    },
    /// Run the benchmark and write JSON and CSV reports.
    Eval {
        /// Task file. Defaults to the shipped 25-task benchmark.
        dataset: Option<PathBuf>,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        world: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        parallelism: usize,
        /// Directory for report.json and report.csv.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    /// An OpenAI-compatible endpoint.
    Http,
    /// Known-correct answers for the benchmark tasks.
    Oracle,
    /// Benchmark answers missing a semicolon on the first pass.
    Flaky,
    /// Replies read in order from --script.
    Scripted,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value = "http")]
    pub backend: Backend,
    /// JSON array of reply strings for the scripted backend.
    #[arg(long, value_name = "PATH")]
    pub script: Option<PathBuf>,
    #[arg(long, env = "RSL_BASE_URL", default_value = "https://api.openai.com/v1")]
    pub base_url: String,
    #[arg(long, env = "RSL_MODEL")]
    pub model: Option<String>,
    #[arg(long, env = "RSL_API_KEY", hide_env_values = true)]
    pub api_key: Option<String>,
    #[arg(long, default_value_t = 60)]
    pub timeout_secs: u64,
    #[arg(long, default_value_t = 3)]
    pub retries: u32,
    #[arg(long, default_value_t = DEFAULT_MAX_PASSES)]
    pub max_passes: u32,
    /// Leave the example shots out of the prompt.
    #[arg(long)]
    pub zero_shot: bool,
}

/// A failure on its way to an exit code.
struct Failed(Exit, String);

type CmdResult = Result<Exit, Failed>;

fn input<E: fmt::Display>(e: E) -> Failed {
    Failed(Exit::Input, e.to_string())
}

fn read(path: &Path) -> Result<String, Failed> {
    std::fs::read_to_string(path).map_err(|e| input(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), Failed> {
    std::fs::write(path, contents).map_err(|e| input(format!("cannot write {}: {e}", path.display())))
}

fn manifest(path: Option<&Path>) -> Result<SkillManifest, Failed> {
    match path {
        None => Ok(SkillManifest::default_manifest()),
        Some(p) => load_manifest(&read(p)?).map_err(|e| input(format!("{}: {e}", p.display()))),
    }
}

fn world(path: Option<&Path>) -> Result<World, Failed> {
    match path {
        None => Ok(benchmark_world()),
        Some(p) => World::from_json(&read(p)?).map_err(|e| input(format!("{}: {e}", p.display()))),
    }
}

fn print_diagnostics(err: &mut dyn Write, diagnostics: &[Diagnostic]) {
    for d in diagnostics {
        let _ = writeln!(err, "{}", d.render());
    }
}

fn llm_exit(e: &LlmError) -> Exit {
    match e {
        LlmError::InvalidRequest(_) => Exit::Input,
        _ => Exit::Transport,
    }
}

impl ModelArgs {
    fn prompt(&self) -> PromptParts {
        if self.zero_shot {
            PromptParts::zero_shot_template()
        } else {
            PromptParts::default_template()
        }
    }

    fn client(&self) -> Result<ChatClient, Failed> {
        match self.backend {
            Backend::Oracle => Ok(offline_client("oracle", Arc::new(OracleStub::benchmark()))),
            Backend::Flaky => Ok(offline_client("flaky", Arc::new(FlakyStub::benchmark()))),
            Backend::Scripted => {
                let path = self.script.as_deref().ok_or_else(|| input("--backend scripted needs --script"))?;
                let replies: Vec<String> = serde_json::from_str(&read(path)?)
                    .map_err(|e| input(format!("{}: expected a JSON array of strings: {e}", path.display())))?;
                if replies.is_empty() {
                    return Err(input(format!("{}: no replies", path.display())));
                }
                Ok(ChatClient::scripted(Arc::new(ScriptedTransport::new(replies))))
            }
            Backend::Http => {
                let key = self
                    .api_key
                    .as_deref()
                    .filter(|k| !k.trim().is_empty())
                    .ok_or_else(|| Failed(Exit::Transport, "no API key: set RSL_API_KEY or --api-key".into()))?;
                let model = self.model.as_deref().ok_or_else(|| input("no model: set RSL_MODEL or --model"))?;
                let timeout = Duration::from_secs(self.timeout_secs);
                let config = ModelConfig::new(&self.base_url, model)
                    .and_then(|c| c.with_timeout(timeout))
                    .map_err(input)?
                    .with_api_key(ApiKey::new(key))
                    .with_retries(self.retries, Duration::from_millis(500));
                ChatClient::http(config).map_err(|e| Failed(llm_exit(&e), e.to_string()))
            }
        }
    }
}

fn cmd_check(json: bool, source: &Path, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let outcome = check(&read(source)?);
    if json {
        let v = json!({"ok": outcome.diagnostics.is_empty(), "diagnostics": outcome.diagnostics});
        let _ = writeln!(out, "{v}");
    }
    print_diagnostics(err, &outcome.diagnostics);
    Ok(if outcome.diagnostics.is_empty() { Exit::Success } else { Exit::Failure })
}

fn cmd_compile(
    json: bool,
    source: &Path,
    manifest_path: Option<&Path>,
    out_path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let text = read(source)?;
    let manifest = manifest(manifest_path)?;
    let target = out_path.map_or_else(|| source.with_extension("py"), Path::to_path_buf);
    let verified = match check(&text).into_verified() {
        Ok(v) => v,
        Err(outcome) => {
            if json {
                let _ = writeln!(out, "{}", json!({"ok": false, "diagnostics": outcome.diagnostics}));
            }
            print_diagnostics(err, &outcome.diagnostics);
            return Ok(Exit::Failure);
        }
    };
    let code = generate(&verified, &manifest).map_err(input)?;
    write(&target, &code)?;
    if json {
        let _ = writeln!(out, "{}", json!({"ok": true, "output": target}));
    } else {
        let _ = writeln!(out, "wrote {}", target.display());
    }
    Ok(Exit::Success)
}

fn state_json(state: &RobotState) -> serde_json::Value {
    json!({
        "statements": state.trace.len(),
        "pose": state.pose,
        "held": state.held,
        "perceived": state.perceived,
    })
}

fn cmd_run(
    json: bool,
    source: &Path,
    world_path: Option<&Path>,
    trace_path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let text = read(source)?;
    let world = world(world_path)?;
    let trace = trace_path.map_or_else(
        || {
            let mut p = source.as_os_str().to_owned();
            p.push(".trace.jsonl");
            PathBuf::from(p)
        },
        Path::to_path_buf,
    );
    let verified = match check(&text).into_verified() {
        Ok(v) => v,
        Err(outcome) => {
            print_diagnostics(err, &outcome.diagnostics);
            return Ok(Exit::Failure);
        }
    };
    let result = simulate(&verified, &world, RobotState::default());
    let (state, failure) = match &result {
        Ok(s) => (s, None),
        Err(f) => (&f.state, Some(f)),
    };
    write(&trace, &state.trace_jsonl())?;
    if json {
        let mut v = state_json(state);
        v["trace"] = json!(trace);
        v["error"] = json!(failure.map(|f| f.to_string()));
        let _ = writeln!(out, "{v}");
    } else {
        let p = state.pose;
        let held = state.held.as_ref().map_or("nothing", |o| o.as_str());
        let _ = writeln!(out, "executed {} of {} statement(s)", state.trace.len(), verified.len());
        let _ = writeln!(out, "position ({}, {}), heading {:.4} rad", fmt_num(p.x), fmt_num(p.y), p.heading);
        let _ = writeln!(out, "camera pan {:.4} rad, tilt {:.4} rad", p.cam_pan, p.cam_tilt);
        let _ = writeln!(out, "holding {held}, perceived {}", if state.perceived { "yes" } else { "no" });
        let _ = writeln!(out, "trace written to {}", trace.display());
    }
    match failure {
        None => Ok(Exit::Success),
        Some(f) => {
            let _ = writeln!(err, "error: {f}");
            Ok(Exit::Failure)
        }
    }
}

/// Shortest of `3` and `3.0000` style formatting, so exact positions read
/// naturally.
fn fmt_num(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".to_owned() } else { s.to_owned() }
}

#[allow(clippy::too_many_arguments)]
fn cmd_translate(
    json: bool,
    task: &str,
    model: &ModelArgs,
    compile_to: Option<&Path>,
    manifest_path: Option<&Path>,
    transcript: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let manifest = compile_to.map(|_| manifest(manifest_path)).transpose()?;
    let client = model.client()?;
    let parts = model.prompt().with_task(task);
    let outcome = match translate(&parts, &client, model.max_passes) {
        Ok(o) => o,
        Err(TranslateError::Llm { source, pass, .. }) => {
            return Err(Failed(llm_exit(&source), format!("pass {pass}: {source}")))
        }
        Err(e) => return Err(input(e)),
    };
    if let Some(path) = transcript {
        write(path, &serde_json::to_string_pretty(&outcome.to_json()).expect("json"))?;
    }
    let Some(program) = outcome.program.clone().filter(|_| outcome.verified) else {
        if json {
            let _ = writeln!(out, "{}", outcome.to_json());
        }
        let _ = writeln!(err, "no verified program after {} pass(es); last diagnostics:", outcome.passes);
        print_diagnostics(err, outcome.last_diagnostics());
        return Ok(Exit::Failure);
    };
    if let (Some(path), Some(manifest)) = (compile_to, &manifest) {
        let verified = VerifiedProgram::new(program.clone()).map_err(|d| input(format!("{} diagnostic(s)", d.len())))?;
        write(path, &generate(&verified, manifest).map_err(input)?)?;
    }
    if json {
        let _ = writeln!(out, "{}", outcome.to_json());
    } else {
        let _ = writeln!(out, "{}", program.render());
        let _ = writeln!(out, "passes: {}", outcome.passes);
    }
    Ok(Exit::Success)
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    json: bool,
    dataset: Option<&Path>,
    model: &ModelArgs,
    world_path: Option<&Path>,
    parallelism: usize,
    out_dir: &Path,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let tasks = match dataset {
        None => benchmark_tasks(),
        Some(p) => load_tasks(p).map_err(input)?,
    };
    let world = world(world_path)?;
    let client = model.client()?;
    let parallelism = if model.backend == Backend::Scripted {
        if parallelism > 1 {
            let _ = writeln!(err, "note: the scripted backend runs tasks one at a time");
        }
        1
    } else {
        parallelism
    };
    let report = evaluate(&tasks, &client, &model.prompt(), &world, model.max_passes, parallelism).map_err(input)?;
    std::fs::create_dir_all(out_dir).map_err(|e| input(format!("cannot create {}: {e}", out_dir.display())))?;
    let json_path = out_dir.join("report.json");
    let csv_path = out_dir.join("report.csv");
    write(&json_path, &report.to_json())?;
    write(&csv_path, &report.to_csv())?;
    if json {
        let v = json!({
            "tasks": report.tasks,
            "successes": report.successes,
            "accurate": report.accurate,
            "success_rate": report.success_rate,
            "accuracy": report.accuracy,
            "mean_pass": report.mean_pass,
            "report_json": json_path,
            "report_csv": csv_path,
        });
        let _ = writeln!(out, "{v}");
    } else {
        let _ = writeln!(out, "success rate: {}/{}", report.successes, report.tasks);
        let _ = writeln!(out, "accuracy: {}/{}", report.accurate, report.tasks);
        let _ = writeln!(out, "mean pass: {:.2}", report.mean_pass);
        let _ = writeln!(out, "reports: {}, {}", json_path.display(), csv_path.display());
    }
    Ok(Exit::Success)
}

/// Runs one invocation. All output goes through `out` and `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Exit {
    let json = cli.json;
    let result = match &cli.command {
        Command::Check { source } => cmd_check(json, source, out, err),
        Command::Compile { source, manifest, out: target } => {
            cmd_compile(json, source, manifest.as_deref(), target.as_deref(), out, err)
        }
        Command::Run { source, world, trace } => cmd_run(json, source, world.as_deref(), trace.as_deref(), out, err),
        Command::Translate { task, model, compile, manifest, transcript } => cmd_translate(
            json,
            task,
            model,
            compile.as_deref(),
            manifest.as_deref(),
            transcript.as_deref(),
            out,
            err,
        ),
        Command::Eval { dataset, model, world, parallelism, out_dir } => {
            cmd_eval(json, dataset.as_deref(), model, world.as_deref(), *parallelism, out_dir, out, err)
        }
    };
    match result {
        Ok(code) => code,
        Err(Failed(code, message)) => {
            if json {
                let _ = writeln!(out, "{}", json!({"ok": false, "exit": code as u8, "error": message}));
            }
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}
