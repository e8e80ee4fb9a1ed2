//! `lowlying`: batch front end for the low-lying zero library.

mod commands;
mod config;
mod error;
mod output;

use clap::{Args, Parser, Subcommand};
use config::RunConfig;
use error::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "lowlying", version, about = "Low-lying zero statistics for φ×f and φ×sym²f")]
struct Cli {
    /// key=value file; flags given on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write CSV here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte Carlo n-level statistics against the closed-form predictions.
    Rmt(RmtArgs),
    /// Weighted 1- or 2-level density of a family and its symmetry verdict.
    Family(FamilyArgs),
    /// Consistency checks; exits 3 if any fails.
    Checks(ChecksArgs),
    /// Prime sums against their limits over a range of R.
    PrimeSums(PrimeSumArgs),
    /// Gamma-factor term against ĝ(0).
    Gamma(GammaArgs),
    /// Root numbers of the φ families.
    RootNumber(RootArgs),
}

#[derive(Args, Debug)]
struct RmtArgs {
    /// Comma-separated groups: U, USp, O, SOeven, SOodd.
    #[arg(long)]
    group: Option<String>,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Support of the second test function for the 2-level statistic.
    #[arg(long)]
    sigma2: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// One row per sample instead of summaries.
    #[arg(long)]
    per_sample: bool,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    #[arg(long)]
    tag: Option<String>,
    /// Weights, `12,16` or `12..24`.
    #[arg(long = "k")]
    k: Option<String>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    sigma2: Option<f64>,
    #[arg(long)]
    two_level: bool,
    #[arg(long)]
    maass: Option<PathBuf>,
    /// Use random λ_φ(p) from this seed instead of a data file.
    #[arg(long)]
    synthetic_seed: Option<u64>,
    /// Coefficient range and Euler product cutoff for the eigenforms.
    #[arg(long)]
    euler: Option<u64>,
}

#[derive(Args, Debug)]
struct ChecksArgs {
    #[arg(long)]
    weights: Option<String>,
    #[arg(long)]
    maass: Option<PathBuf>,
    #[arg(long)]
    euler: Option<u64>,
    /// λ_f(p) cache to compare against freshly computed eigenforms.
    #[arg(long)]
    hecke_cache: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct PrimeSumArgs {
    #[arg(long)]
    sigma: Option<f64>,
    /// Comma-separated values of R.
    #[arg(long = "R")]
    r: Option<String>,
}

#[derive(Args, Debug)]
struct GammaArgs {
    #[arg(long)]
    tag: Option<String>,
    #[arg(long = "k")]
    k: Option<String>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    maass: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RootArgs {
    #[arg(long)]
    tag: Option<String>,
    #[arg(long = "k")]
    k: Option<String>,
}

fn set_opt<T: ToString>(cfg: &mut RunConfig, key: &str, v: &Option<T>) -> Result<(), CliError> {
    match v {
        Some(v) => cfg.set(key, &v.to_string()),
        None => Ok(()),
    }
}

fn set_path(cfg: &mut RunConfig, key: &str, v: &Option<PathBuf>) -> Result<(), CliError> {
    set_opt(cfg, key, &v.as_ref().map(|p| p.display().to_string()))
}

/// Config holding only what was given on the command line.
fn flag_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut c = RunConfig::default();
    match &cli.command {
        Command::Rmt(a) => {
            c.command = "rmt".into();
            set_opt(&mut c, "groups", &a.group)?;
            set_opt(&mut c, "n", &a.n)?;
            set_opt(&mut c, "samples", &a.samples)?;
            set_opt(&mut c, "sigma", &a.sigma)?;
            set_opt(&mut c, "sigma2", &a.sigma2)?;
            set_opt(&mut c, "seed", &a.seed)?;
            c.per_sample = a.per_sample;
        }
        Command::Family(a) => {
            c.command = "family".into();
            set_opt(&mut c, "family", &a.tag)?;
            set_opt(&mut c, "weights", &a.k)?;
            set_opt(&mut c, "sigma", &a.sigma)?;
            set_opt(&mut c, "sigma2", &a.sigma2)?;
            set_path(&mut c, "maass", &a.maass)?;
            set_opt(&mut c, "synthetic_seed", &a.synthetic_seed)?;
            set_opt(&mut c, "euler", &a.euler)?;
            c.two_level = a.two_level;
        }
        Command::Checks(a) => {
            c.command = "checks".into();
            set_opt(&mut c, "weights", &a.weights)?;
            set_path(&mut c, "maass", &a.maass)?;
            set_opt(&mut c, "euler", &a.euler)?;
            set_path(&mut c, "hecke_cache", &a.hecke_cache)?;
            set_opt(&mut c, "seed", &a.seed)?;
        }
        Command::PrimeSums(a) => {
            c.command = "prime-sums".into();
            set_opt(&mut c, "sigma", &a.sigma)?;
            set_opt(&mut c, "r", &a.r)?;
        }
        Command::Gamma(a) => {
            c.command = "gamma".into();
            set_opt(&mut c, "family", &a.tag)?;
            set_opt(&mut c, "weights", &a.k)?;
            set_opt(&mut c, "sigma", &a.sigma)?;
            set_path(&mut c, "maass", &a.maass)?;
        }
        Command::RootNumber(a) => {
            c.command = "root-number".into();
            set_opt(&mut c, "family", &a.tag)?;
            set_opt(&mut c, "weights", &a.k)?;
        }
    }
    set_path(&mut c, "output", &cli.output)?;
    Ok(c)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let flags = flag_config(&cli)?;
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    if !cfg.command.is_empty() && cfg.command != flags.command {
        return Err(CliError::Usage(format!(
            "config file is for `{}`, not `{}`",
            cfg.command, flags.command
        )));
    }
    cfg.overlay(&flags);
    commands::dispatch(&mut cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
