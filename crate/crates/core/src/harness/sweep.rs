use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{Estimator, ExperimentConfig, SweepMode};
use super::output::CurveSet;
use crate::analyst::{run_ada, AdaOutcome};
use crate::baseline::nada_estimate;
use crate::datagen::{random_mixture, sample_in_domain, GaussianMixture};
use crate::error::Result;
use crate::estimate::{flat_estimate, interpolated_estimate, DensityEstimate, EstimateMode};
use crate::metrics::{uniform_grid, MetricReport};
use crate::polya::{mean_mass_tree, sample_average_mass_tree};
use crate::responder::{CountingOracle, Dataset};

const MIXTURE_STREAM: u64 = 0;
const DATASET_STREAM: u64 = 1;
const ESTIMATOR_STREAM: u64 = 2;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial` at budget `k`:
/// `mix(mix(mix(master) ^ k) ^ trial)` with the SplitMix64 finalizer.
pub fn derive_seed(master: u64, k: usize, trial: usize) -> u64 {
    mix(mix(mix(master) ^ k as u64) ^ trial as u64)
}

fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub k: usize,
    pub mode: SweepMode,
    pub trial: usize,
    pub seed: u64,
    pub mse: f64,
    pub tv: f64,
    pub wall_time: Duration,
    pub error: Option<String>,
}

impl TrialResult {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

/// Ground truth, data and every requested estimate for one `(k, trial)`.
pub struct TrialData {
    pub seed: u64,
    pub mixture: GaussianMixture,
    pub dataset: Dataset,
    pub ada: Option<AdaOutcome>,
    pub estimates: Vec<(SweepMode, Result<DensityEstimate>, Duration)>,
}

impl TrialData {
    pub fn build(config: &ExperimentConfig, k: usize, trial: usize) -> Result<TrialData> {
        let seed = derive_seed(config.seed, k, trial);
        let domain = config.scenario.domain()?;
        let mixture = random_mixture(&mut stream(seed, MIXTURE_STREAM), &config.scenario)?;
        let dataset = sample_in_domain(
            &mixture,
            config.n,
            domain,
            &mut stream(seed, DATASET_STREAM),
        )?;

        let wants_ada = config.modes.iter().any(|m| m.estimate_mode().is_some());
        let started = Instant::now();
        let ada = if wants_ada {
            Some(run_ada(&dataset, &config.prior_spec(), k)?)
        } else {
            None
        };
        let leaves = match &ada {
            Some(out) => {
                let masses = match config.estimator {
                    Estimator::Mean => mean_mass_tree(&out.tree),
                    Estimator::SampleAverage(draws) => sample_average_mass_tree(
                        &out.tree,
                        draws,
                        &mut stream(seed, ESTIMATOR_STREAM),
                    )?,
                };
                out.tree.leaf_masses(&masses)
            }
            None => Vec::new(),
        };
        let ada_time = started.elapsed();

        let estimates = config
            .modes
            .iter()
            .map(|&mode| {
                let started = Instant::now();
                let est = match mode.estimate_mode() {
                    None => nada_estimate(&dataset, k),
                    Some(EstimateMode::Flat) => flat_estimate(&leaves),
                    Some(m) => interpolated_estimate(&leaves, m).map(|e| {
                        if config.renormalize {
                            e.renormalized()
                        } else {
                            e
                        }
                    }),
                };
                let mut took = started.elapsed();
                if mode != SweepMode::Nada {
                    took += ada_time;
                }
                (mode, est, took)
            })
            .collect();

        Ok(TrialData {
            seed,
            mixture,
            dataset,
            ada,
            estimates,
        })
    }
}

/// Scores every configured mode on one freshly drawn `(k, trial)`.
pub fn run_trial(config: &ExperimentConfig, k: usize, trial: usize) -> Vec<TrialResult> {
    let seed = derive_seed(config.seed, k, trial);
    let failed = |mode, msg: String| TrialResult {
        k,
        mode,
        trial,
        seed,
        mse: f64::NAN,
        tv: f64::NAN,
        wall_time: Duration::ZERO,
        error: Some(msg),
    };
    let data = match TrialData::build(config, k, trial) {
        Ok(d) => d,
        Err(e) => {
            return config
                .modes
                .iter()
                .map(|&m| failed(m, e.to_string()))
                .collect()
        }
    };
    if config.grid < 2 {
        return config
            .modes
            .iter()
            .map(|&m| failed(m, "grid needs two points".into()))
            .collect();
    }
    let domain = data.dataset.domain();
    let xs = uniform_grid(domain, config.grid);
    let truth: Vec<f64> = xs.iter().map(|&x| data.mixture.density(x)).collect();
    data.estimates
        .into_iter()
        .map(|(mode, est, took)| match est {
            Ok(est) => {
                let started = Instant::now();
                let values: Vec<f64> = xs.iter().map(|&x| est.evaluate(x)).collect();
                let report = MetricReport::from_grid(&truth, &values, domain);
                TrialResult {
                    k,
                    mode,
                    trial,
                    seed,
                    mse: report.mse,
                    tv: report.tv,
                    wall_time: took + started.elapsed(),
                    error: None,
                }
            }
            Err(e) => failed(mode, e.to_string()),
        })
        .collect()
}

fn tasks(config: &ExperimentConfig) -> Vec<(usize, usize)> {
    config
        .k
        .iter()
        .flat_map(|&k| (0..config.trials).map(move |t| (k, t)))
        .collect()
}

fn canonical(mut rows: Vec<TrialResult>) -> Vec<TrialResult> {
    rows.sort_by_key(|r| (r.k, r.mode, r.trial));
    rows
}

/// Every `(k, trial)` of the configuration, run in parallel, sorted by
/// `(k, mode, trial)`.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<TrialResult>> {
    config.validate()?;
    let rows = tasks(config)
        .into_par_iter()
        .flat_map_iter(|(k, t)| run_trial(config, k, t))
        .collect();
    Ok(canonical(rows))
}

/// [`run_sweep`] on the calling thread.
pub fn run_sweep_sequential(config: &ExperimentConfig) -> Result<Vec<TrialResult>> {
    config.validate()?;
    let rows = tasks(config)
        .into_iter()
        .flat_map(|(k, t)| run_trial(config, k, t))
        .collect();
    Ok(canonical(rows))
}

/// Truth and every configured estimate of trial 0 at budget `k`, sampled on
/// `points` grid points.
pub fn curves(config: &ExperimentConfig, k: usize, points: usize) -> Result<(CurveSet, TrialData)> {
    config.validate()?;
    let data = TrialData::build(config, k, 0)?;
    let xs = if points == 0 {
        Vec::new()
    } else {
        uniform_grid(data.dataset.domain(), points.max(2))
    };
    let truth = xs.iter().map(|&x| data.mixture.density(x)).collect();
    let mut columns = Vec::new();
    for (mode, est, _) in &data.estimates {
        let est = est.as_ref().map_err(|e| {
            crate::error::Error::InvalidArgument(format!("{mode} estimate failed: {e}"))
        })?;
        columns.push((
            mode.to_string(),
            xs.iter().map(|&x| est.evaluate(x)).collect(),
        ));
    }
    Ok((CurveSet { xs, truth, columns }, data))
}
