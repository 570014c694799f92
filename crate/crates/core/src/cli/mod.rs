//! Command-line front end: `run`, `sweep` and `lyapunov`.

pub mod commands;
pub mod config;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::dynsys::{validated_lyapunov, LogisticSystem, MapForm};
use crate::error::{Error, Result};
use crate::mpfloat::Prec;
use crate::orbit::{ErrorMode, SearchMode};
pub use commands::*;
pub use config::{ConfigFile, SweepConfig};

#[derive(Debug, Parser)]
#[command(
    name = "orbitprec",
    version,
    about = "Guaranteed-accuracy orbits of the logistic map"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimal precision for one orbit, with the orbit listing.
    Run(RunArgs),
    /// CSV of minimal precision and loss rate over a mu grid.
    Sweep(SweepArgs),
    /// CSV of Lyapunov exponent estimates over a mu grid.
    Lyapunov(SweepArgs),
}

#[derive(Debug, Args, Default)]
pub struct OrbitArgs {
    /// key=value settings; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Initial value, e.g. 0.22 or 11/50.
    #[arg(long)]
    pub x0: Option<String>,
    /// Orbit length.
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Required decimal digits.
    #[arg(long)]
    pub p: Option<i32>,
    /// form1|form2|form3|mean-value|running-error
    #[arg(long)]
    pub form: Option<MapForm>,
    /// relative|absolute
    #[arg(long)]
    pub mode: Option<ErrorMode>,
    /// increment|bracket
    #[arg(long)]
    pub search: Option<SearchMode>,
    #[arg(long = "m-cap")]
    pub m_cap: Option<Prec>,
    /// Lyapunov orbit length.
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Leading Lyapunov steps discarded.
    #[arg(long)]
    pub transient: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct RunArgs {
    #[arg(long)]
    pub mu: Option<String>,
    #[command(flatten)]
    pub orbit: OrbitArgs,
    /// Also estimate the Lyapunov exponent.
    #[arg(long)]
    pub lyapunov: bool,
}

#[derive(Debug, Args, Default)]
pub struct SweepArgs {
    /// Single mu instead of a range.
    #[arg(long)]
    pub mu: Option<String>,
    #[arg(long = "mu-start")]
    pub mu_start: Option<String>,
    #[arg(long = "mu-end")]
    pub mu_end: Option<String>,
    #[arg(long = "mu-step")]
    pub mu_step: Option<String>,
    #[command(flatten)]
    pub orbit: OrbitArgs,
    /// Worker threads.
    #[arg(long, env = "ORBITPREC_JOBS")]
    pub jobs: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// N=2000 and mu step 0.005.
    #[arg(long = "paper-scale")]
    pub paper_scale: bool,
    /// Seed for the minimality spot checks.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "spot-checks")]
    pub spot_checks: Option<usize>,
}

fn load_config(path: &Option<PathBuf>) -> Result<ConfigFile> {
    match path {
        Some(p) => ConfigFile::load(p),
        None => Ok(ConfigFile::default()),
    }
}

fn apply_orbit_args(cfg: &mut SweepConfig, file: &ConfigFile, a: &OrbitArgs) -> Result<()> {
    if let Some(x0) = file.pick_rational(a.x0.as_deref(), "x0")? {
        cfg.x0 = x0;
    }
    if let Some(v) = file.pick(a.n, "N")? {
        cfg.n = v;
    }
    if let Some(v) = file.pick(a.p, "p")? {
        cfg.p = v;
    }
    if let Some(v) = file.pick(a.form, "form")? {
        cfg.form = v;
    }
    if let Some(v) = file.pick(a.mode, "mode")? {
        cfg.mode = v;
    }
    if let Some(v) = file.pick(a.search, "search")? {
        cfg.search = v;
    }
    if let Some(v) = file.pick(a.m_cap, "m-cap")? {
        cfg.m_cap = v;
    }
    if let Some(v) = file.pick(a.iterations, "iterations")? {
        cfg.iterations = v;
    }
    if let Some(v) = file.pick(a.transient, "transient")? {
        cfg.transient = v;
    }
    Ok(())
}

/// Defaults, then the config file, then flags.
pub fn resolve_sweep(a: &SweepArgs) -> Result<SweepConfig> {
    let file = load_config(&a.orbit.config)?;
    let mut cfg = if file.flag(a.paper_scale, "paper-scale")? {
        SweepConfig::paper_scale()
    } else {
        SweepConfig::desk()
    };
    apply_orbit_args(&mut cfg, &file, &a.orbit)?;
    if let Some(mu) = file.pick_rational(a.mu.as_deref(), "mu")? {
        cfg.mu_start = mu.clone();
        cfg.mu_end = mu;
    }
    if let Some(v) = file.pick_rational(a.mu_start.as_deref(), "mu-start")? {
        cfg.mu_start = v;
    }
    if let Some(v) = file.pick_rational(a.mu_end.as_deref(), "mu-end")? {
        cfg.mu_end = v;
    }
    if let Some(v) = file.pick_rational(a.mu_step.as_deref(), "mu-step")? {
        cfg.mu_step = v;
    }
    cfg.jobs = file.pick(a.jobs, "jobs")?;
    cfg.out = file.pick(a.out.clone(), "out")?;
    if let Some(v) = file.pick(a.seed, "seed")? {
        cfg.seed = v;
    }
    if let Some(v) = file.pick(a.spot_checks, "spot-checks")? {
        cfg.spot_checks = v;
    }
    Ok(cfg)
}

/// Settings for `run`; the mu range collapses to the single `--mu`.
pub fn resolve_run(a: &RunArgs) -> Result<SweepConfig> {
    let file = load_config(&a.orbit.config)?;
    let mut cfg = SweepConfig::desk();
    apply_orbit_args(&mut cfg, &file, &a.orbit)?;
    let mu = file
        .pick_rational(a.mu.as_deref(), "mu")?
        .ok_or_else(|| Error::InvalidParameter("--mu is required".into()))?;
    cfg.mu_start = mu.clone();
    cfg.mu_end = mu;
    Ok(cfg)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_run(a: &RunArgs) -> Result<i32> {
    let cfg = resolve_run(a)?;
    let sys = LogisticSystem::new(cfg.mu_start.clone(), cfg.form)?;
    let lambda = if a.lyapunov {
        let est = validated_lyapunov(&sys, &cfg.x0, cfg.iterations, cfg.transient, LYAPUNOV_M_CAP)?;
        (!est.singular()).then_some(est.value)
    } else {
        None
    };
    let found = rate_report(&sys, &cfg, lambda)?;
    let mut text = orbit_listing(&found.run, cfg.p);
    text.push_str("# report\n");
    match &found.report {
        Some(r) => text.push_str(&report_summary(r)),
        None => text.push_str(&format!("m_min={} (no rate for N=0)", found.m_min)),
    }
    text.push('\n');
    text.push_str(SWEEP_HEADER);
    text.push('\n');
    text.push_str(&found.row(&sys, &cfg).to_csv());
    text.push('\n');
    emit(&None, &text)?;
    Ok(0)
}

fn cmd_sweep(a: &SweepArgs) -> Result<i32> {
    let cfg = resolve_sweep(a)?;
    let outcome = run_sweep(&cfg)?;
    emit(&cfg.out, &outcome.csv())?;
    let bad: Vec<_> = outcome.spot_checks.iter().filter(|c| !c.verified).collect();
    for c in &bad {
        eprintln!("minimality re-check failed for row {}", c.row + 1);
    }
    Ok(if bad.is_empty() { 0 } else { 1 })
}

fn cmd_lyapunov(a: &SweepArgs) -> Result<i32> {
    let cfg = resolve_sweep(a)?;
    let rows = run_lyapunov_sweep(&cfg)?;
    emit(&cfg.out, &lyapunov_csv(&rows))?;
    Ok(0)
}

/// Exit code: 0 on success, 2 when a search hit its precision cap, 1 on any
/// other failure.
pub fn execute(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Lyapunov(a) => cmd_lyapunov(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("orbitprec: {e}");
            if matches!(e, Error::NoHaltWithinCap { .. }) {
                2
            } else {
                1
            }
        }
    }
}
