use clap::Parser;
use mzm_cnot_cli::config::{Command, Overrides, RunConfig};
use mzm_cnot_cli::{execute, CliError};
use std::path::PathBuf;
use std::process::ExitCode;

/// Braided CNOT simulator: verification, tomography and resilience runs.
#[derive(Parser, Debug)]
#[command(name = "mzm-cnot", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// TOML run configuration; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Shot count per setting, or `exact`.
    #[arg(long)]
    shots: Option<String>,
    /// Error / dephasing probability.
    #[arg(long)]
    p: Option<f64>,
    /// Noise placement; disables calibration of the resilience study.
    #[arg(long)]
    placement: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Resilience sample count.
    #[arg(long)]
    samples: Option<usize>,
}

fn resolve(args: &Args) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cfg.command = args.command;
    cfg.apply(&Overrides {
        seed: args.seed,
        shots: args.shots.clone(),
        p: args.p,
        placement: args.placement.clone(),
        out: args.out.clone(),
        samples: args.samples,
    })?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = resolve(&args).and_then(|cfg| execute(&cfg));
    match outcome {
        Ok(o) => {
            for f in &o.files {
                println!("wrote {}", f.display());
            }
            if o.passed {
                println!("{}: pass", o.command);
                ExitCode::SUCCESS
            } else {
                println!("{}: FAIL", o.command);
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("mzm-cnot: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
