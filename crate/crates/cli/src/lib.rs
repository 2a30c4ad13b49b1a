//! Runner behind the `mzm-cnot` binary.
//!
//! Every command writes `<command>.json` into the output directory. The
//! resilience command also writes `fig6c.csv`, `fig6d.csv` and
//! `summary.json`. Reports embed the resolved configuration and carry no
//! timestamps, so equal configurations give byte-identical files.

pub mod config;
pub mod experiments;
pub mod reference;
pub mod report;
pub mod study;
pub mod verify;

use config::{Command, RunConfig};
use report::{csv_string, to_pretty_json, write_text};
use serde::Serialize;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Run(String),
}

impl CliError {
    pub(crate) fn run<E: std::fmt::Display>(e: E) -> Self {
        CliError::Run(e.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(_) => 1,
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: Command,
    config: &'a RunConfig,
    passed: bool,
    report: &'a T,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub command: Command,
    pub passed: bool,
    pub report: serde_json::Value,
    pub files: Vec<PathBuf>,
}

fn envelope<T: Serialize>(cfg: &RunConfig, passed: bool, report: &T) -> Result<(String, serde_json::Value), CliError> {
    let env = Envelope { command: cfg.command, config: cfg, passed, report };
    let value = serde_json::to_value(&env).map_err(CliError::run)?;
    Ok((to_pretty_json(&env)?, value))
}

/// Validates `cfg`, runs its command and writes the reports.
pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.output_dir)
        .map_err(|e| CliError::Config(format!("{}: {e}", cfg.output_dir.display())))?;
    let dir = cfg.output_dir.as_path();
    let report_name = format!("{}.json", cfg.command);
    let mut files = Vec::new();
    let (passed, text, value) = match cfg.command {
        Command::Verify => {
            let r = verify::run_verify()?;
            let (t, v) = envelope(cfg, r.passed, &r)?;
            (r.passed, t, v)
        }
        Command::Tomography => {
            let (t, v) = envelope(cfg, true, &experiments::run_tomography(cfg)?)?;
            (true, t, v)
        }
        Command::Bell => {
            let (t, v) = envelope(cfg, true, &experiments::run_bell(cfg)?)?;
            (true, t, v)
        }
        Command::FitP => {
            let (t, v) = envelope(cfg, true, &experiments::run_fit(cfg)?)?;
            (true, t, v)
        }
        Command::Resilience => {
            let out = study::run_resilience(cfg)?;
            files.push(write_text(dir, "fig6c.csv", &csv_string(&out.curve)?)?);
            files.push(write_text(dir, "fig6d.csv", &csv_string(&out.exceedance)?)?);
            files.push(write_text(dir, "summary.json", &to_pretty_json(&out.summary)?)?);
            let (t, v) = envelope(cfg, true, &out.summary)?;
            (true, t, v)
        }
    };
    files.push(write_text(dir, &report_name, &text)?);
    Ok(Outcome { command: cfg.command, passed, report: value, files })
}
