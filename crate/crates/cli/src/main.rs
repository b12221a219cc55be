//! `hypwalk`: runs named experiments from a TOML configuration file.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 estimator failure, 1 anything else.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use hypwalk::experiment::{run, Command, ExperimentConfig, Format};

#[derive(Parser, Debug)]
#[command(name = "hypwalk", version, about = "Random-walk experiments on hyperbolic surfaces and trees")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Experiment configuration (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory, created if missing.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Overrides `walk.seed` from the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Primary format for tabular outputs.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Drift, rescaling factor and their ratio along the family grid.
    DriftSweep,
    /// Limit tree, its drift, and rescaled drifts along the grid.
    Semicontinuity,
    /// Entropy bound over drift along the grid.
    DimensionDrop,
    /// Schottky search, brute-force check and certification along the grid.
    SchottkyCertify,
    /// Large-deviation tails with a log-linear fit.
    Tail,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::DriftSweep => Command::DriftSweep,
            Cmd::Semicontinuity => Command::Semicontinuity,
            Cmd::DimensionDrop => Command::DimensionDrop,
            Cmd::SchottkyCertify => Command::SchottkyCertify,
            Cmd::Tail => Command::Tail,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum FormatArg {
    Csv,
    Json,
}

const EXIT_OTHER: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_ESTIMATOR: u8 = 3;

/// Maps an error chain to the documented exit code.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<hypwalk::Error>() {
        Some(hypwalk::Error::Config(_)) => EXIT_CONFIG,
        Some(_) => EXIT_ESTIMATOR,
        None => EXIT_OTHER,
    }
}

fn load_config(path: &Path, seed: Option<u64>) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| hypwalk::Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::from_toml_str(&text)?;
    if let Some(s) = seed {
        cfg.walk.seed = s;
        cfg.validate()?;
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<u8> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| hypwalk::Error::Config("--config <PATH> is required".into()))?;
    let cfg = load_config(path, cli.seed)?;
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(hypwalk::Error::Config("--jobs must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let command = Command::from(cli.command);
    let output = run(command, &cfg, format).with_context(|| format!("{command} failed"))?;

    fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    for file in &output.files {
        let target = cli.out.join(&file.name);
        fs::write(&target, &file.contents).with_context(|| format!("writing {}", target.display()))?;
        println!("wrote {}", target.display());
    }
    for line in &output.summary {
        println!("{line}");
    }
    Ok(match &output.failure {
        Some(msg) => {
            eprintln!("error: {msg}");
            EXIT_ESTIMATOR
        }
        None => 0,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
