//! The adaptive analyst.
//!
//! Each round the analyst scores every leaf `I` of its analysis tree with
//!
//! ```text
//! u(I) = 2^l * n * nu^2 * rho (1 - rho) / ((1 + eta) (1 + eta + n))
//! ```
//!
//! where `l` is the leaf's level, `n` its sample count, `nu` its posterior
//! mean mass and `(rho, eta)` the prior elicited for its split. It then asks
//! for the count of the best leaf's left child, infers the right child's
//! count, and updates the leaf's Beta parameters.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{Interval, NodeId, MAX_LEVEL};
use crate::polya::{posterior_mean_mass, AnalysisTree, BetaParams};
use crate::responder::CountingOracle;

/// Leaves at this level are never split unless configured otherwise.
pub const DEFAULT_DEPTH_CAP: u32 = 30;

/// Confidence schedule `eta_l(i) = base * growth^i * l^2`, with an extra
/// factor `1 + (n/2) / l_max^2` once `l > l_max`. The `l^2` factor is taken
/// as 1 at the root so its split prior stays proper.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EtaSchedule {
    pub base: f64,
    pub growth: f64,
}

impl Default for EtaSchedule {
    fn default() -> Self {
        EtaSchedule {
            base: 0.4,
            growth: 1.02,
        }
    }
}

impl EtaSchedule {
    pub fn eta(&self, level: u32, round: u64, n: u64, l_max: u32) -> f64 {
        let l2 = if level == 0 {
            1.0
        } else {
            f64::from(level) * f64::from(level)
        };
        let mut eta = self.base * self.growth.powf(round as f64) * l2;
        if level > l_max {
            let lm = f64::from(l_max.max(1));
            eta *= 1.0 + (n as f64 / 2.0) / (lm * lm);
        }
        eta
    }
}

/// [`EtaSchedule::eta`] with the default constants 0.4 and 1.02.
pub fn default_eta(level: u32, round: u64, n: u64, l_max: u32) -> f64 {
    EtaSchedule::default().eta(level, round, n, l_max)
}

/// Finest meaningful level, `ceil(log2(half_width / sigma_low))`, at least 1.
pub fn default_l_max(half_width: f64, sigma_low: f64) -> u32 {
    let l = (half_width / sigma_low).log2().ceil();
    if l.is_finite() && l >= 1.0 {
        l as u32
    } else {
        1
    }
}

type RhoRule = Arc<dyn Fn(NodeId) -> f64 + Send + Sync>;
type EtaRule = Arc<dyn Fn(u32, u64) -> f64 + Send + Sync>;

/// How the analyst turns its beliefs into a Beta prior for each new leaf.
#[derive(Clone)]
pub struct PriorSpec {
    rho_rule: RhoRule,
    eta_rule: EtaRule,
    l_max: u32,
    depth_cap: u32,
}

impl fmt::Debug for PriorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PriorSpec")
            .field("l_max", &self.l_max)
            .field("depth_cap", &self.depth_cap)
            .finish_non_exhaustive()
    }
}

impl PriorSpec {
    /// Even splits (`rho = 1/2`) with the given confidence schedule for a
    /// dataset of `n` samples.
    pub fn schedule(schedule: EtaSchedule, n: u64, l_max: u32) -> Self {
        PriorSpec::custom(
            |_| 0.5,
            move |level, round| schedule.eta(level, round, n, l_max),
            l_max,
        )
    }

    pub fn custom<R, E>(rho_rule: R, eta_rule: E, l_max: u32) -> Self
    where
        R: Fn(NodeId) -> f64 + Send + Sync + 'static,
        E: Fn(u32, u64) -> f64 + Send + Sync + 'static,
    {
        PriorSpec {
            rho_rule: Arc::new(rho_rule),
            eta_rule: Arc::new(eta_rule),
            l_max: l_max.max(1),
            depth_cap: DEFAULT_DEPTH_CAP,
        }
    }

    /// Leaves at `depth_cap` or deeper are never split.
    pub fn with_depth_cap(mut self, depth_cap: u32) -> Self {
        self.depth_cap = depth_cap.min(MAX_LEVEL - 1);
        self
    }

    pub fn l_max(&self) -> u32 {
        self.l_max
    }

    pub fn depth_cap(&self) -> u32 {
        self.depth_cap
    }

    pub fn rho(&self, node: NodeId) -> f64 {
        (self.rho_rule)(node)
    }

    pub fn eta(&self, level: u32, round: u64) -> f64 {
        (self.eta_rule)(level, round)
    }

    /// Prior of `node`'s split, for a node that became a leaf in `round`.
    pub fn elicit(&self, node: NodeId, round: u64) -> Result<BetaParams> {
        BetaParams::from_rho_eta(self.rho(node), self.eta(node.level(), round))
    }
}

/// Utility from the raw leaf quantities. Zero when the leaf is empty or its
/// split is certain.
pub fn leaf_utility(level: u32, count: u64, nu: f64, rho: f64, eta: f64) -> f64 {
    let n = count as f64;
    let scale = (level as f64).exp2();
    scale * n * nu * nu * rho * (1.0 - rho) / ((1.0 + eta) * (1.0 + eta + n))
}

/// Expected variance reduction from resolving `leaf`'s split under `prior`.
pub fn utility(tree: &AnalysisTree, leaf: NodeId, prior: BetaParams) -> Result<f64> {
    if !tree.is_leaf(leaf) {
        return Err(if tree.contains(leaf) {
            Error::NotALeaf(leaf)
        } else {
            Error::MissingNode(leaf)
        });
    }
    let nu = posterior_mean_mass(tree, leaf)?;
    Ok(leaf_utility(
        leaf.level(),
        tree.count(leaf)?,
        nu,
        prior.rho(),
        prior.eta(),
    ))
}

/// Ranking key: higher utility first, then lower level, then smaller index.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    utility: f64,
    leaf: NodeId,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.utility
            .total_cmp(&other.utility)
            .then_with(|| other.leaf.level().cmp(&self.leaf.level()))
            .then_with(|| other.leaf.index().cmp(&self.leaf.index()))
    }
}

/// Utility of every splittable leaf, using the prior each leaf was given
/// when it was created.
pub fn score_leaves(tree: &AnalysisTree, prior: &PriorSpec) -> Result<Vec<(NodeId, f64)>> {
    tree.leaves()
        .into_iter()
        .filter(|leaf| leaf.level() < prior.depth_cap())
        .map(|leaf| {
            let round = tree.get(leaf).map_or(0, |r| r.created_round);
            let u = utility(tree, leaf, prior.elicit(leaf, round)?)?;
            Ok((leaf, u))
        })
        .collect()
}

/// The next node to query: the left child of the highest-utility leaf.
pub fn select_query(tree: &AnalysisTree, prior: &PriorSpec) -> Result<NodeId> {
    score_leaves(tree, prior)?
        .into_iter()
        .map(|(leaf, utility)| Candidate { utility, leaf })
        .max()
        .map(|c| c.leaf.left_child())
        .ok_or(Error::BudgetExhausted {
            depth_cap: prior.depth_cap(),
        })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    /// One-based round number.
    pub round: u64,
    pub queried_node: NodeId,
    pub interval: Interval,
    pub count: u64,
    /// Utility of the leaf that was split.
    pub utility: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct QueryLog {
    pub records: Vec<QueryRecord>,
}

impl QueryLog {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, QueryRecord> {
        self.records.iter()
    }
}

#[derive(Debug, Clone)]
pub struct AdaOutcome {
    pub tree: AnalysisTree,
    pub log: QueryLog,
    /// False when the depth cap ran out of candidates before the budget.
    pub budget_spent: bool,
}

impl AdaOutcome {
    pub fn rounds_completed(&self) -> usize {
        self.log.len()
    }
}

/// Runs `budget` rounds of adaptive counting queries against `oracle`.
///
/// Stops early, with `budget_spent == false`, if every leaf reaches the
/// depth cap first.
pub fn run_ada<O>(oracle: &O, prior: &PriorSpec, budget: usize) -> Result<AdaOutcome>
where
    O: CountingOracle + ?Sized,
{
    if budget == 0 {
        return Err(Error::InvalidArgument(
            "the query budget must be at least 1".into(),
        ));
    }
    let mut tree = AnalysisTree::new(oracle.domain(), oracle.total())?;
    let mut log = QueryLog::default();
    let mut heap = BinaryHeap::new();
    // A leaf's utility never changes after creation: its ancestors are
    // already updated and its own prior is fixed, so one push per leaf.
    push_candidate(&mut heap, &tree, prior, NodeId::ROOT, 0)?;

    for round in 0..budget as u64 {
        let Some(best) = heap.pop() else {
            return Ok(AdaOutcome {
                tree,
                log,
                budget_spent: false,
            });
        };
        let parent = best.leaf;
        let query = parent.left_child();
        let interval = tree.interval(query);
        let n_left = oracle.count_in(&interval)?;
        let leaf_prior = prior.elicit(parent, tree.get(parent).map_or(0, |r| r.created_round))?;
        tree.split(parent, n_left, leaf_prior, round)?;
        log.records.push(QueryRecord {
            round: round + 1,
            queried_node: query,
            interval,
            count: n_left,
            utility: best.utility,
        });
        push_candidate(&mut heap, &tree, prior, query, round)?;
        push_candidate(&mut heap, &tree, prior, parent.right_child(), round)?;
    }
    Ok(AdaOutcome {
        tree,
        log,
        budget_spent: true,
    })
}

fn push_candidate(
    heap: &mut BinaryHeap<Candidate>,
    tree: &AnalysisTree,
    prior: &PriorSpec,
    leaf: NodeId,
    round: u64,
) -> Result<()> {
    if leaf.level() < prior.depth_cap() {
        let utility = utility(tree, leaf, prior.elicit(leaf, round)?)?;
        heap.push(Candidate { utility, leaf });
    }
    Ok(())
}
