use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analyst::{default_l_max, EtaSchedule, PriorSpec, DEFAULT_DEPTH_CAP};
use crate::datagen::ScenarioParams;
use crate::error::{Error, Result};
use crate::estimate::EstimateMode;
use crate::metrics::DEFAULT_GRID_POINTS;

/// Budgets swept by default.
pub const DESK_K_GRID: &[usize] = &[1, 5, 10, 25, 50, 80, 150, 300, 500, 1000, 2000];

/// Budgets rendered by the `curves` command by default.
pub const FIGURE_K: &[usize] = &[25, 80, 1000];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    Nada,
    Mid,
    Junc,
    Flat,
}

impl SweepMode {
    pub const ALL: [SweepMode; 4] = [
        SweepMode::Nada,
        SweepMode::Mid,
        SweepMode::Junc,
        SweepMode::Flat,
    ];

    /// Rendering of the adaptive tree, or `None` for the baseline.
    pub fn estimate_mode(self) -> Option<EstimateMode> {
        match self {
            SweepMode::Nada => None,
            SweepMode::Mid => Some(EstimateMode::Mid),
            SweepMode::Junc => Some(EstimateMode::Junc),
            SweepMode::Flat => Some(EstimateMode::Flat),
        }
    }
}

impl fmt::Display for SweepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepMode::Nada => "nada",
            SweepMode::Mid => "mid",
            SweepMode::Junc => "junc",
            SweepMode::Flat => "flat",
        })
    }
}

impl FromStr for SweepMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepMode::ALL
            .into_iter()
            .find(|m| m.to_string() == s.trim())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown mode {s:?}")))
    }
}

/// How leaf masses are read off the posterior tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Estimator {
    /// Exact posterior mean masses.
    Mean,
    /// Node-wise average of this many sampled mass trees.
    SampleAverage(usize),
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Estimator::Mean => f.write_str("mean"),
            Estimator::SampleAverage(n) => write!(f, "sample:{n}"),
        }
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "mean" {
            return Ok(Estimator::Mean);
        }
        match s.strip_prefix("sample:").map(str::parse::<usize>) {
            Some(Ok(n)) if n > 0 => Ok(Estimator::SampleAverage(n)),
            _ => Err(Error::InvalidArgument(format!(
                "estimator must be \"mean\" or \"sample:<count>\", got {s:?}"
            ))),
        }
    }
}

impl TryFrom<String> for Estimator {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Estimator> for String {
    fn from(e: Estimator) -> String {
        e.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PriorConfig {
    pub base: f64,
    pub growth: f64,
    /// Defaults to `ceil(log2(x_lim / sigma_low))`.
    pub l_max: Option<u32>,
    pub depth_cap: u32,
}

impl Default for PriorConfig {
    fn default() -> Self {
        let s = EtaSchedule::default();
        PriorConfig {
            base: s.base,
            growth: s.growth,
            l_max: None,
            depth_cap: DEFAULT_DEPTH_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub k: Vec<usize>,
    pub trials: usize,
    pub modes: Vec<SweepMode>,
    pub seed: u64,
    pub estimator: Estimator,
    /// Quadrature points for the metrics.
    pub grid: usize,
    /// Scale interpolated curves to unit mass before scoring.
    pub renormalize: bool,
    pub prior: PriorConfig,
    pub scenario: ScenarioParams,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: 10_000,
            k: DESK_K_GRID.to_vec(),
            trials: 50,
            modes: vec![SweepMode::Nada, SweepMode::Mid, SweepMode::Junc],
            seed: 20_240_917,
            estimator: Estimator::Mean,
            grid: DEFAULT_GRID_POINTS,
            renormalize: false,
            prior: PriorConfig::default(),
            scenario: ScenarioParams::default(),
            out: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str, origin: &Path) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ExperimentConfig::from_toml(&text, path)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.n == 0 {
            return fail("n must be positive");
        }
        if self.k.is_empty() || self.k.contains(&0) {
            return fail("k values must be a nonempty list of positive budgets");
        }
        if self.trials == 0 {
            return fail("trials must be positive");
        }
        if self.modes.is_empty() {
            return fail("at least one mode is required");
        }
        if self.grid < 2 {
            return fail("grid needs at least two points");
        }
        if !(self.prior.base > 0.0 && self.prior.growth > 0.0) {
            return fail("prior constants must be positive");
        }
        self.scenario.domain()?;
        Ok(())
    }

    pub fn l_max(&self) -> u32 {
        self.prior
            .l_max
            .unwrap_or_else(|| default_l_max(self.scenario.x_lim, self.scenario.sigma_low))
    }

    pub fn prior_spec(&self) -> PriorSpec {
        let schedule = EtaSchedule {
            base: self.prior.base,
            growth: self.prior.growth,
        };
        PriorSpec::schedule(schedule, self.n as u64, self.l_max())
            .with_depth_cap(self.prior.depth_cap)
    }
}
