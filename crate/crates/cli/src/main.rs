mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use qic_core::{build_qic, capacity_table, run_validation, weighting_grid_all};

use config::{load, parse_times, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "qic", version, about = "Quantum information capsules and detector channel capacities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Capacities of every receiver subset of a sender/receiver scenario.
    Capacity(Common),
    /// Weighting functions of the capsule modes on a grid.
    Evolve(Common),
    /// `evolve` with the shockwave preset.
    Shockwave(Common),
    /// Invariant checks with measured residuals.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Comma-separated check names.
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<String>>,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// Spatial dimension (2 or 3).
    #[arg(long = "dim")]
    dim: Option<u8>,
    /// Named scenario: table1, single or shockwave.
    #[arg(long)]
    preset: Option<String>,
    /// TOML run configuration; flags take precedence over its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Snapshot time(s), comma separated.
    #[arg(long = "t", allow_hyphen_values = true)]
    t: Option<String>,
    /// Grid: per axis `min:max:step` or a fixed value, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Logarithm base of capacities: 2 or e.
    #[arg(long = "log-base")]
    log_base: Option<String>,
    /// Relative quadrature tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn resolve(&self, only: Option<Vec<String>>) -> Result<RunConfig> {
        let times = self.t.as_deref().map(parse_times).transpose()?;
        let cfg = load(self.config.as_deref())?;
        Ok(cfg.apply(Overrides {
            dimension: self.dim,
            preset: self.preset.clone(),
            times,
            grid: self.grid.clone(),
            log_base: self.log_base.clone(),
            rel_tol: self.tol,
            threads: self.threads,
            out: self.out.clone(),
            only,
        }))
    }
}

fn init_threads(cfg: &RunConfig) -> Result<()> {
    if let Some(n) = cfg.threads {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn capacity(cfg: RunConfig) -> Result<()> {
    let sc = cfg.channel()?;
    let base = cfg.log_base()?;
    let opts = cfg.kernel_options()?;
    init_threads(&cfg)?;
    for w in &sc.warnings {
        eprintln!("warning: {w}");
    }
    let result = capacity_table(&sc, base, &opts)?;
    let name = cfg.preset.clone().unwrap_or_else(|| "config".into());
    output::emit(&output::capacity_report(&name, &sc, &result), cfg.out.as_deref())
}

fn evolve(cfg: RunConfig) -> Result<()> {
    let (gens, times, grid) = cfg.field_setup()?;
    let opts = cfg.kernel_options()?;
    let eps = cfg.degeneracy_eps()?;
    init_threads(&cfg)?;
    let modes = build_qic(&gens, eps, &opts)?;
    let grids = times.iter().map(|&t| weighting_grid_all(&modes, t, &grid, &opts)).collect::<Result<Vec<_>, _>>()?;
    output::emit(&output::grid_table(&grids, &gens, &modes.skipped), cfg.out.as_deref())
}

#[derive(Debug)]
struct ChecksFailed(usize);

impl std::fmt::Display for ChecksFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} check(s) failed", self.0)
    }
}

impl std::error::Error for ChecksFailed {}

fn validate(cfg: RunConfig) -> Result<()> {
    let opts = cfg.kernel_options()?;
    init_threads(&cfg)?;
    let report = run_validation(&cfg.only, &opts)?;
    output::emit(&output::validation_lines(&report), cfg.out.as_deref())?;
    if !report.all_passed() {
        return Err(ChecksFailed(report.checks.iter().filter(|c| !c.passed).count()).into());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Capacity(c) => capacity(c.resolve(None)?),
        Command::Evolve(c) => evolve(c.resolve(None)?),
        Command::Shockwave(c) => {
            if c.preset.as_deref().is_some_and(|p| p != "shockwave") {
                bail!("the shockwave command always uses the shockwave preset");
            }
            let mut c = c;
            c.preset = Some("shockwave".into());
            evolve(c.resolve(None)?)
        }
        Command::Validate { common, only } => validate(common.resolve(only)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            // bad input is distinguished from failed computations
            let input = match e.downcast_ref::<qic_core::Error>() {
                Some(qic_core::Error::Usage(_) | qic_core::Error::Config(_) | qic_core::Error::UnsupportedChannel(_)) => true,
                Some(_) => false,
                None => !e.is::<ChecksFailed>(),
            };
            ExitCode::from(if input { 2 } else { 1 })
        }
    }
}
