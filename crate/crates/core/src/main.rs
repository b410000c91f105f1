use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use solwave::cli_io::{parse_config, run, Command};
use solwave::Error;

#[derive(Parser)]
#[command(
    name = "solwave",
    version,
    about = "Solitary waves of nonlocal dispersive equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute one solitary wave.
    Solve(Args),
    /// Continuation sweep over `solver.continuation`.
    Sweep(Args),
    /// Solve, then time-integrate the wave and check it travels.
    Evolve(Args),
    /// Run the probe selected by `probe.kind`.
    Probe(Args),
}

#[derive(clap::Args)]
struct Args {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Solve(a) => (Command::Solve, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
        Cmd::Evolve(a) => (Command::Evolve, a),
        Cmd::Probe(a) => (Command::Probe, a),
    };
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = args.out {
        cfg.output_dir = out;
    }
    if let Some(c) = cfg.command {
        if c != command {
            eprintln!("error: config declares command {c:?}, invoked as {command:?}");
            return ExitCode::from(2);
        }
    }
    match run(&cfg, command, &cfg.output_dir) {
        Ok(outcome) => {
            if !args.quiet {
                println!("{}", outcome.summary);
            }
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
