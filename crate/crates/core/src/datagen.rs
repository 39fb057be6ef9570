//! Random Gaussian-mixture ground truths and samples from them.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::Interval;
use crate::responder::Dataset;

/// Draws allowed per requested sample before rejection sampling gives up.
const MAX_ATTEMPTS_PER_SAMPLE: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub mu: f64,
    pub sigma: f64,
}

/// Equal-weight mixture of normal components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianMixture {
    components: Vec<Component>,
}

impl GaussianMixture {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("a mixture needs a component".into()));
        }
        if let Some(c) = components
            .iter()
            .find(|c| !(c.mu.is_finite() && c.sigma.is_finite() && c.sigma > 0.0))
        {
            return Err(Error::InvalidArgument(format!(
                "invalid component mu={}, sigma={}",
                c.mu, c.sigma
            )));
        }
        Ok(GaussianMixture { components })
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn density(&self, x: f64) -> f64 {
        let norm = (2.0 * PI).sqrt();
        let sum: f64 = self
            .components
            .iter()
            .map(|c| {
                let z = (x - c.mu) / c.sigma;
                (-0.5 * z * z).exp() / (c.sigma * norm)
            })
            .sum();
        sum / self.components.len() as f64
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let c = self.components[rng.random_range(0..self.components.len())];
        Normal::new(c.mu, c.sigma)
            .expect("components are validated")
            .sample(rng)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("mixture serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: GaussianMixture = toml::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("mixture record: {e}")))?;
        GaussianMixture::new(raw.components)
    }
}

/// Parameters of the random mixture scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioParams {
    pub components: usize,
    pub mu_lim: f64,
    pub sigma_low: f64,
    pub sigma_high: f64,
    /// Half width of the symmetric domain `[-x_lim, x_lim]`.
    pub x_lim: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            components: 8,
            mu_lim: 12.5,
            sigma_low: 0.1,
            sigma_high: 4.0,
            x_lim: 25.0,
        }
    }
}

impl ScenarioParams {
    pub fn domain(&self) -> Result<Interval> {
        Interval::symmetric(self.x_lim)
    }
}

/// Mixture with `mu ~ U(-mu_lim, mu_lim)` and `sigma ~ U(sigma_low, sigma_high)`,
/// all independent.
pub fn random_mixture<R: Rng + ?Sized>(
    rng: &mut R,
    params: &ScenarioParams,
) -> Result<GaussianMixture> {
    let ScenarioParams {
        components,
        mu_lim,
        sigma_low,
        sigma_high,
        ..
    } = *params;
    let sigmas_ordered = sigma_low > 0.0 && sigma_low < sigma_high;
    if components == 0 || mu_lim.is_nan() || mu_lim <= 0.0 || !sigmas_ordered {
        return Err(Error::InvalidArgument(format!(
            "invalid mixture bounds: M={components}, mu_lim={mu_lim}, sigma in [{sigma_low}, {sigma_high}]"
        )));
    }
    let mu = Uniform::new(-mu_lim, mu_lim).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let sigma =
        Uniform::new(sigma_low, sigma_high).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let components = (0..components)
        .map(|_| Component {
            mu: mu.sample(rng),
            sigma: sigma.sample(rng),
        })
        .collect();
    GaussianMixture::new(components)
}

/// `n` draws from `mixture` conditioned on the closed `domain`, sorted.
/// Out-of-domain draws are discarded and redrawn.
pub fn sample_in_domain<R: Rng + ?Sized>(
    mixture: &GaussianMixture,
    n: usize,
    domain: Interval,
    rng: &mut R,
) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let budget = MAX_ATTEMPTS_PER_SAMPLE * n as u64;
    let mut samples = Vec::with_capacity(n);
    let mut attempts = 0u64;
    while samples.len() < n {
        if attempts == budget {
            return Err(Error::TooManyRejections {
                attempts,
                accepted: samples.len(),
            });
        }
        attempts += 1;
        let x = mixture.sample(rng);
        if x >= domain.lo && x <= domain.hi {
            samples.push(x);
        }
    }
    Dataset::new(samples, domain)
}
