use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use polya_ada::harness::{
    aggregate, curves, read_trials, run_sweep, write_curves, write_summary, write_timings,
    write_trials, Estimator, ExperimentConfig, Summary, SweepMode, FIGURE_K,
};

/// Adaptive Polya-tree density estimation experiments.
#[derive(Parser)]
#[command(name = "polya-ada", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded trials over every k and mode; write trials, timings and summary CSVs.
    Sweep(Overrides),
    /// Write truth and estimate curves of trial 0 for each k.
    Curves {
        #[command(flatten)]
        overrides: Overrides,
        /// Evaluation points per curve.
        #[arg(long, default_value_t = 2001)]
        points: usize,
    },
    /// Summarize an existing trials CSV.
    Aggregate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Overrides {
    /// TOML experiment file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated query budgets.
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated subset of nada, mid, junc, flat.
    #[arg(long, value_delimiter = ',')]
    modes: Option<Vec<SweepMode>>,
    #[arg(long)]
    seed: Option<u64>,
    /// `mean` or `sample:<count>`.
    #[arg(long)]
    estimator: Option<Estimator>,
    /// Quadrature points for MSE and TV.
    #[arg(long)]
    grid: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Overrides {
    fn resolve(self, default_k: Option<&[usize]>) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => {
                let mut cfg = ExperimentConfig::default();
                if let Some(k) = default_k {
                    cfg.k = k.to_vec();
                }
                cfg
            }
        };
        if let Some(v) = self.n {
            cfg.n = v;
        }
        if let Some(v) = self.k {
            cfg.k = v;
        }
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = self.modes {
            cfg.modes = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.estimator {
            cfg.estimator = v;
        }
        if let Some(v) = self.grid {
            cfg.grid = v;
        }
        if let Some(v) = self.out {
            cfg.out = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn warn_omitted(summary: &Summary) {
    for (k, mode) in &summary.omitted {
        eprintln!("warning: no successful trials for k={k}, mode={mode}; group omitted");
    }
}

fn sweep(cfg: &ExperimentConfig) -> Result<ExitCode> {
    let rows = run_sweep(cfg)?;
    let trials = cfg.out.join("trials.csv");
    write_trials(&rows, &trials)?;
    write_timings(&rows, &cfg.out.join("timings.csv"))?;
    summarize(&trials, &cfg.out.join("summary.csv"))?;

    let failed: Vec<_> = rows.iter().filter(|r| !r.is_ok()).collect();
    for r in &failed {
        eprintln!(
            "error: k={} mode={} trial={}: {}",
            r.k,
            r.mode,
            r.trial,
            r.error.as_deref().unwrap_or_default()
        );
    }
    eprintln!(
        "{} rows ({} failed) written to {}",
        rows.len(),
        failed.len(),
        cfg.out.display()
    );
    Ok(if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn summarize(input: &Path, out: &Path) -> Result<Summary> {
    let rows = read_trials(input)?;
    let summary = aggregate(&rows);
    warn_omitted(&summary);
    write_summary(&summary, out)?;
    Ok(summary)
}

fn emit_curves(cfg: &ExperimentConfig, points: usize) -> Result<()> {
    for &k in &cfg.k {
        let (set, data) = curves(cfg, k, points).with_context(|| format!("curves at k={k}"))?;
        write_curves(&set, &cfg.out.join(format!("curves_k{k}.csv")))?;
        let mixture = cfg.out.join(format!("mixture_k{k}.toml"));
        std::fs::write(&mixture, data.mixture.to_toml())
            .with_context(|| format!("writing {}", mixture.display()))?;
    }
    eprintln!("curves for k={:?} written to {}", cfg.k, cfg.out.display());
    Ok(())
}

fn run() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Sweep(o) => sweep(&o.resolve(None)?),
        Command::Curves { overrides, points } => {
            emit_curves(&overrides.resolve(Some(FIGURE_K))?, points)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Aggregate { input, out } => {
            let summary = summarize(&input, &out)?;
            Ok(if summary.groups.is_empty() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            })
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
