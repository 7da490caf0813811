//! `isotropy` — analyses of 2-cocycles on finite groups, emitting JSON reports.
//!
//! Exit codes: 0 affirmative, 3 negative / certified none, 4 inconclusive
//! (threshold or heuristic gave up), 1 input error, 5 verification failure.

mod commands;
mod input;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::json;

use commands::Command;
use input::{current_digest, Ctx};
use report::{first_difference, Parameters, Report, Tool, SCHEMA};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] isotropy_core::Error),
    #[error("verification failed: {0}")]
    Verify(String),
}

impl CliError {
    pub fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        CliError::Io { path: path.as_ref().display().to_string(), source }
    }

    fn exit_code(&self) -> u8 {
        use isotropy_core::Error as E;
        match self {
            CliError::Core(E::Threshold { .. }) => 4,
            CliError::Core(E::Verification(_)) | CliError::Verify(_) => 5,
            _ => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "isotropy", version, about = "Isotropic subgroups, nondegeneracy and obstructions for 2-cocycles on finite groups")]
struct Cli {
    /// Write the report here instead of stdout; timing goes to `<out>.timing.json`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

fn configure_threads() {
    if let Some(n) = std::env::var("ISOTROPY_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn emit(out: Option<&Path>, body: &str, timing: serde_json::Value) -> Result<(), CliError> {
    match out {
        Some(p) => {
            std::fs::write(p, body).map_err(|e| CliError::io(p, e))?;
            let mut tp = p.as_os_str().to_owned();
            tp.push(".timing.json");
            let t = serde_json::to_string_pretty(&timing).expect("timing serializes") + "\n";
            std::fs::write(&tp, t).map_err(|e| CliError::io(PathBuf::from(&tp), e))?;
        }
        None => {
            print!("{body}");
            eprintln!("{timing}");
        }
    }
    Ok(())
}

fn build_report(cmd: &Command) -> Result<(Report, Ctx), CliError> {
    let tuning = cmd.tuning();
    let mut ctx = Ctx::new(tuning.limits(), tuning.seed);
    let outcome = cmd.run(&mut ctx)?;
    let report = Report {
        schema: SCHEMA.into(),
        tool: Tool { name: "isotropy".into(), version: env!("CARGO_PKG_VERSION").into() },
        command: cmd.name().into(),
        invocation: serde_json::to_value(cmd).expect("commands serialize"),
        inputs: ctx.inputs.clone(),
        parameters: Parameters { seed: ctx.seed, limits: ctx.limits },
        verdict: outcome.verdict,
        exit_code: outcome.verdict.exit_code(),
        results: outcome.results,
        witnesses: outcome.witnesses,
    };
    Ok((report, ctx))
}

/// Digests, then witnesses, then a full recomputation compared field by field.
fn verify(path: &str) -> Result<serde_json::Value, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let stored: Report =
        serde_json::from_slice(&bytes).map_err(|e| CliError::Input(format!("{path}: not a report: {e}")))?;
    if stored.schema != SCHEMA {
        return Err(CliError::Input(format!("unsupported report schema '{}'", stored.schema)));
    }
    for rec in &stored.inputs {
        let now = current_digest(rec)?;
        if now != rec.sha256 {
            return Err(CliError::Verify(format!(
                "digest mismatch for {} input {}: report has {}, found {now}",
                rec.role, rec.source, rec.sha256
            )));
        }
    }
    let cmd: Command = serde_json::from_value(stored.invocation.clone())
        .map_err(|e| CliError::Input(format!("invocation cannot be replayed: {e}")))?;
    if matches!(cmd, Command::Verify { .. }) {
        return Err(CliError::Input("cannot verify a verify report".into()));
    }
    let (fresh, ctx) = build_report(&cmd)?;
    let mut checks = Vec::new();
    for w in &stored.witnesses {
        w.replay(ctx.group.as_deref(), ctx.cocycle.as_ref(), &ctx.limits)
            .map_err(|why| CliError::Verify(format!("witness '{}': {why}", w.name())))?;
        checks.push(w.name().to_string());
    }
    if fresh.verdict != stored.verdict || fresh.exit_code != stored.exit_code {
        return Err(CliError::Verify("verdict differs on recomputation".into()));
    }
    if let Some(at) = first_difference(&stored.results, &fresh.results, "/results") {
        return Err(CliError::Verify(format!("recomputed results differ at {at}")));
    }
    checks.push("recomputed results".into());
    Ok(json!({"report": path, "status": "verified", "checks": checks}))
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let started = Instant::now();
    let mut cmd = cli.command;
    cmd.absolutize_paths();
    if let Command::Verify { report } = &cmd {
        let summary = verify(report)?;
        let body = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
        emit(cli.out.as_deref(), &body, json!({"command": "verify", "elapsed_seconds": started.elapsed().as_secs_f64()}))?;
        return Ok(0);
    }
    let (report, _) = build_report(&cmd)?;
    let body = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    let timing = json!({"command": report.command, "elapsed_seconds": started.elapsed().as_secs_f64()});
    emit(cli.out.as_deref(), &body, timing)?;
    Ok(report.exit_code as u8)
}

fn main() -> ExitCode {
    configure_threads();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
