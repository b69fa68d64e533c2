use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stt_core::driver::{self, RunConfig, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "stt", version, about = "Check simplicial type theory source files", args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    check: CheckArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Check files and everything they import (the default command).
    Check(CheckArgs),
}

#[derive(clap::Args)]
struct CheckArgs {
    /// Source files to check.
    targets: Vec<PathBuf>,
    /// Emit one JSON object per module instead of rendered diagnostics.
    #[arg(long)]
    json: bool,
    /// Print every tope entailment query to stderr.
    #[arg(long)]
    trace_tope: bool,
    /// Number of modules checked in parallel.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u32).range(1..))]
    jobs: Option<u32>,
    /// Maximum number of interval variables in one tope query.
    #[arg(long, value_name = "N", default_value_t = stt_core::tope::DEFAULT_CAPACITY as u32,
          value_parser = clap::value_parser!(u32).range(1..))]
    capacity: u32,
    /// Neither read nor write the `.stt-cache` directory.
    #[arg(long)]
    no_cache: bool,
    /// Additional directory to search for imports (repeatable). STT_PATH
    /// adds more.
    #[arg(long = "path", value_name = "DIR")]
    paths: Vec<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let args = match cli.command {
        Some(Command::Check(a)) => a,
        None => cli.check,
    };
    if args.targets.is_empty() {
        eprintln!("error: no input files\n\nUsage: stt [check] [OPTIONS] <TARGETS>...");
        return ExitCode::from(EXIT_USAGE as u8);
    }
    let mut search_paths = args.paths;
    if let Some(extra) = std::env::var_os("STT_PATH") {
        search_paths.extend(std::env::split_paths(&extra).filter(|p| !p.as_os_str().is_empty()));
    }
    let jobs = args.jobs.map_or_else(
        || std::thread::available_parallelism().map_or(1, |n| n.get()),
        |j| j as usize,
    );
    let config = RunConfig {
        targets: args.targets,
        search_paths,
        json_output: args.json,
        trace_tope: args.trace_tope,
        jobs,
        capacity: args.capacity as usize,
        no_cache: args.no_cache,
        ..RunConfig::default()
    };
    ExitCode::from(driver::run(&config) as u8)
}
