//! Batch driver for the csns laboratory: configuration, dispatch and run manifests.
//!
//! Exit codes: 0 success, 2 rejected configuration, 3 compute failure,
//! 4 invariant-gate failure. Errors go to standard error as one JSON object.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod fields;
pub mod manifest;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use commands::{Command, Context};
use config::{Overrides, RunConfig};
use error::{CliError, CliResult};
use manifest::Artifacts;

/// Environment variable that overrides `--out`.
pub const OUT_ENV: &str = "CSNS_OUT";

#[derive(Debug, Parser)]
#[command(
    name = "csns",
    version,
    about = "Critical-space Navier-Stokes laboratory"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args, Clone, Default)]
pub struct CommonArgs {
    /// JSON run configuration; missing keys take their defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overridden by CSNS_OUT).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for parallel stages.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Force one worker thread (deterministic mode).
    #[arg(long, global = true)]
    pub serial: bool,
}

#[derive(Debug, Subcommand, Clone, Copy)]
pub enum Cmd {
    /// Forced or unforced run with trajectory, diagnostics and observables.
    Simulate,
    /// Steady state of the configured force.
    Steady,
    /// Perturbation run with the measured bootstrap bound.
    Perturb,
    /// Inequality suites over a seeded corpus.
    Verify,
    /// Planted profile round trip.
    Profiles,
    /// Rescaled-data ladder.
    LambdaScan,
    /// Decomposition of forced solutions built from planted profiles.
    DecomposeSolutions,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Simulate => Command::Simulate,
            Cmd::Steady => Command::Steady,
            Cmd::Perturb => Command::Perturb,
            Cmd::Verify => Command::Verify,
            Cmd::Profiles => Command::Profiles,
            Cmd::LambdaScan => Command::LambdaScan,
            Cmd::DecomposeSolutions => Command::DecomposeSolutions,
        }
    }
}

/// Effective configuration for a command: file, then flags, then `CSNS_OUT`.
pub fn resolve_config(common: &CommonArgs, env_out: Option<PathBuf>) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::load(common.config.as_deref())?;
    cfg.apply(
        &Overrides {
            out: common.out.clone(),
            seed: common.seed,
            threads: common.threads,
            serial: common.serial,
        },
        env_out,
    );
    Ok(cfg)
}

/// Validate, compute and persist. Artifacts written before a compute or
/// gate failure are kept and listed in the manifest.
pub fn execute(cmd: Command, cfg: &RunConfig) -> CliResult<Value> {
    let bad = commands::violations(cmd, cfg);
    if !bad.is_empty() {
        return Err(CliError::Config { violations: bad });
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    let out = Artifacts::create(cfg.out_dir())?;
    let mut ctx = Context { cfg, out };
    ctx.out.write_json("config.json", cfg)?;
    let result = pool.install(|| match cmd {
        Command::Simulate => commands::simulate(&mut ctx),
        Command::Steady => commands::steady(&mut ctx),
        Command::Perturb => commands::perturb(&mut ctx),
        Command::Verify => commands::verify(&mut ctx),
        Command::Profiles => commands::profiles(&mut ctx),
        Command::LambdaScan => commands::lambda_scan_cmd(&mut ctx),
        Command::DecomposeSolutions => commands::decompose(&mut ctx),
    });
    let Context { out, .. } = ctx;
    let mut out = out;
    if let Err(e) = &result {
        let status = match e {
            CliError::Gate { .. } => "gate_failed",
            _ => "failed",
        };
        out.stage("run", status, Some(e.to_json().to_string()));
    }
    out.finish(cmd.name(), &cfg.digest(), cfg.seed, cfg.threads)?;
    result
}

/// Parse-free entry point used by the binary and the tests.
pub fn run(cli: &Cli, env_out: Option<PathBuf>) -> CliResult<Value> {
    let cfg = resolve_config(&cli.common, env_out)?;
    execute(cli.command.into(), &cfg)
}
