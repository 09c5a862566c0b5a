use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use rsl_cli::Cli;
use tracing_subscriber::EnvFilter;

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::from_env("RSL_LOG"))
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = rsl_cli::run(cli, &mut out, &mut err);
    let _ = out.flush();
    ExitCode::from(code as u8)
}
