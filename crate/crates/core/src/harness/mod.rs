//! Seeded Monte-Carlo experiments comparing the adaptive estimates with the
//! equal-width histogram baseline.
//!
//! Every `(k, trial)` pair draws its own mixture and dataset from a seed
//! derived from the master seed, and every mode in the configuration is
//! scored on that same dataset, so comparisons between modes are paired.

mod config;
mod output;
mod summary;
mod sweep;

pub use config::{Estimator, ExperimentConfig, PriorConfig, SweepMode, DESK_K_GRID, FIGURE_K};
pub use output::{
    format_sig9, read_trials, write_curves, write_summary, write_timings, write_trials, CurveSet,
};
pub use summary::{aggregate, percentile, Stats, Summary, SummaryRow};
pub use sweep::{
    curves, derive_seed, run_sweep, run_sweep_sequential, run_trial, TrialData, TrialResult,
};
