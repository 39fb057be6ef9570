//! Adaptive density estimation through counting queries.
//!
//! An analyst holds a finite Pólya-tree prior over densities on a bounded
//! interval. Each round it scores the leaves of its current analysis tree,
//! asks the data holder how many samples fall in the left child of the best
//! leaf, and folds the answer into the Beta hyperparameters of that leaf.
//! After `k` rounds the posterior mean masses of the leaves are rendered as
//! a flat histogram or as one of two interpolated curves.
//!
//! ```
//! use polya_ada::{run_ada, Dataset, Interval, PriorSpec, flat_estimate, mean_mass_tree};
//!
//! let domain = Interval::new(0.0, 1.0).unwrap();
//! let samples = (0..100).map(|i| (i as f64 / 100.0).powi(2)).collect();
//! let data = Dataset::new(samples, domain).unwrap();
//! let prior = PriorSpec::schedule(Default::default(), 100, 4);
//!
//! let outcome = run_ada(&data, &prior, 10).unwrap();
//! assert_eq!(outcome.tree.internal_count(), 10);
//!
//! let masses = mean_mass_tree(&outcome.tree);
//! let estimate = flat_estimate(&outcome.tree.leaf_masses(&masses)).unwrap();
//! assert!((estimate.integral() - 1.0).abs() < 1e-9);
//! ```

pub mod analyst;
pub mod baseline;
pub mod datagen;
mod error;
pub mod estimate;
pub mod harness;
pub mod metrics;
pub mod partition;
pub mod polya;
pub mod responder;

pub use analyst::{
    default_eta, default_l_max, run_ada, select_query, utility, AdaOutcome, EtaSchedule, PriorSpec,
    QueryLog, QueryRecord, DEFAULT_DEPTH_CAP,
};
pub use baseline::nada_estimate;
pub use datagen::{random_mixture, sample_in_domain, Component, GaussianMixture, ScenarioParams};
pub use error::{Error, Result};
pub use estimate::{
    flat_estimate, interpolated_estimate, junction_points, DensityEstimate, EstimateMode,
};
pub use metrics::{mse, tv, MetricReport};
pub use partition::{interval_of, Interval, NodeId};
pub use polya::{
    conjugate_update, mean_mass_tree, posterior_mean_mass, sample_average_mass_tree,
    sample_mass_tree, AnalysisTree, BetaParams, MassTree, NodeRecord,
};
pub use responder::{CountingOracle, Dataset};
