//! `strominger-verify`: run residual suites from a JSON configuration.
//!
//! Exit codes: 0 all pass, 1 residual failure, 2 configuration error,
//! 3 I/O failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use strominger_core::harness::{emit_report, run_suite_with_threads, ResidualReport, RunConfig, Suite};
use strominger_core::Error;

#[derive(Parser)]
#[command(name = "strominger-verify", version, about = "Residual checks for twistor and Calabi-type metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify the hyperkähler model (determinant and ASD checks).
    ValidateModel(RunArgs),
    /// Run suites and print a summary.
    Check(RunArgs),
    /// Run suites and emit the JSON report (stdout unless an output path is set).
    Report(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 3,
        _ => 2,
    }
}

fn load(args: &RunArgs, forced: Option<Suite>) -> Result<RunConfig, Error> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = &args.suite {
        cfg.suite = Suite::parse(s)?;
    }
    if let Some(s) = forced {
        cfg.suite = s;
    }
    if let Some(seed) = args.seed {
        cfg.sampling.seed = seed;
    }
    if let Some(n) = args.points {
        cfg.sampling.count = n;
    }
    if let Some(out) = &args.out {
        cfg.output = Some(out.clone());
    }
    Ok(cfg)
}

fn summary(report: &ResidualReport) {
    for (name, s) in &report.suites {
        println!(
            "{:<22} {}  max {:.3e}  mean {:.3e}  tol {:.1e}  points {}  errors {}",
            name,
            if s.pass { "PASS" } else { "FAIL" },
            s.max,
            s.mean,
            s.tolerance,
            s.points,
            s.errors
        );
    }
}

fn run(command: Command) -> Result<bool, Error> {
    let (args, forced, print_json) = match command {
        Command::ValidateModel(a) => (a, Some(Suite::Hyperkahler), false),
        Command::Check(a) => (a, None, false),
        Command::Report(a) => (a, None, true),
    };
    let cfg = load(&args, forced)?;
    let threads = args.threads.unwrap_or(0);
    let report = run_suite_with_threads(&cfg, threads)?;
    match &cfg.output {
        Some(path) => emit_report(&report, path)?,
        None if print_json => print!("{}", report.to_json()),
        None => {}
    }
    if !print_json || cfg.output.is_some() {
        summary(&report);
    }
    Ok(report.all_pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
