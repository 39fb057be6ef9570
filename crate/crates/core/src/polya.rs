//! Finite Pólya-tree state over an analysis tree.
//!
//! Each internal node `p` splits its probability mass between its children
//! with an independent `Y_p ~ Beta(alpha_p, beta_p)`: the left child gets
//! `M_p * Y_p` and the right child `M_p * (1 - Y_p)`. Observing the child
//! counts `(n_L, n_R)` moves `(alpha_p, beta_p)` to
//! `(alpha_p + n_L, beta_p + n_R)` and leaves every other node untouched, so
//! the tree can be grown one counting query at a time.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{interval_of, Interval, NodeId};

/// Beta hyperparameters of one split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    alpha: f64,
    beta: f64,
}

impl BetaParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && alpha > 0.0 && beta > 0.0) {
            return Err(Error::InvalidBeta { alpha, beta });
        }
        Ok(BetaParams { alpha, beta })
    }

    /// From an expected left share `rho` in (0, 1) and a confidence `eta > 0`.
    pub fn from_rho_eta(rho: f64, eta: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0 && eta.is_finite() && eta > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "rho must lie in (0, 1) and eta must be positive, got rho={rho}, eta={eta}"
            )));
        }
        BetaParams::new(rho * eta, (1.0 - rho) * eta)
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Expected left share, `alpha / (alpha + beta)`.
    #[inline]
    pub fn rho(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }

    #[inline]
    pub fn eta(&self) -> f64 {
        self.alpha + self.beta
    }

    /// `rho (1 - rho) / (1 + eta)`.
    pub fn variance(&self) -> f64 {
        let rho = self.rho();
        rho * (1.0 - rho) / (1.0 + self.eta())
    }
}

/// Posterior of one split after `n_left` and `n_right` samples fell in its
/// two children.
pub fn conjugate_update(params: BetaParams, n_left: u64, n_right: u64) -> BetaParams {
    BetaParams {
        alpha: params.alpha + n_left as f64,
        beta: params.beta + n_right as f64,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    /// Samples in the node's interval.
    pub count: u64,
    /// Posterior split parameters. `Some` exactly on internal nodes.
    pub params: Option<BetaParams>,
    /// Zero-based round in which the node's parent was split (0 for the root).
    pub created_round: u64,
}

/// Full-binary tree of nodes whose sample counts have been revealed, with
/// the split parameters of its internal nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisTree {
    domain: Interval,
    total_n: u64,
    nodes: BTreeMap<NodeId, NodeRecord>,
}

impl AnalysisTree {
    /// A single root leaf holding all `total_n` samples.
    pub fn new(domain: Interval, total_n: u64) -> Result<Self> {
        if total_n == 0 {
            return Err(Error::InvalidArgument(
                "an analysis tree needs at least one sample".into(),
            ));
        }
        Interval::new(domain.lo, domain.hi)?;
        let mut nodes = BTreeMap::new();
        nodes.insert(
            NodeId::ROOT,
            NodeRecord {
                count: total_n,
                params: None,
                created_round: 0,
            },
        );
        Ok(AnalysisTree {
            domain,
            total_n,
            nodes,
        })
    }

    /// Builds the posterior tree in one shot from every revealed count.
    ///
    /// `revealed` maps each node to `(count, created_round)`; `prior` gives
    /// the elicited split prior of an internal node from its address and
    /// creation round. All internal nodes are updated simultaneously.
    pub fn from_revealed<F>(
        domain: Interval,
        revealed: &BTreeMap<NodeId, (u64, u64)>,
        mut prior: F,
    ) -> Result<Self>
    where
        F: FnMut(NodeId, u64) -> Result<BetaParams>,
    {
        let &(total_n, _) = revealed
            .get(&NodeId::ROOT)
            .ok_or(Error::MissingNode(NodeId::ROOT))?;
        let mut tree = AnalysisTree::new(domain, total_n)?;
        tree.nodes.clear();
        for (&node, &(count, created_round)) in revealed {
            let params = if revealed.contains_key(&node.left_child()) {
                let n_left = revealed
                    .get(&node.left_child())
                    .map(|&(c, _)| c)
                    .unwrap_or(0);
                let n_right = revealed
                    .get(&node.right_child())
                    .map(|&(c, _)| c)
                    .ok_or(Error::MissingNode(node.right_child()))?;
                Some(conjugate_update(
                    prior(node, created_round)?,
                    n_left,
                    n_right,
                ))
            } else {
                None
            };
            tree.nodes.insert(
                node,
                NodeRecord {
                    count,
                    params,
                    created_round,
                },
            );
        }
        tree.validate()?;
        Ok(tree)
    }

    #[inline]
    pub fn domain(&self) -> Interval {
        self.domain
    }

    #[inline]
    pub fn total_n(&self) -> u64 {
        self.total_n
    }

    pub fn get(&self, node: NodeId) -> Option<&NodeRecord> {
        self.nodes.get(&node)
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.nodes.contains_key(&node)
    }

    pub fn count(&self, node: NodeId) -> Result<u64> {
        self.record(node).map(|r| r.count)
    }

    fn record(&self, node: NodeId) -> Result<&NodeRecord> {
        self.nodes.get(&node).ok_or(Error::MissingNode(node))
    }

    pub fn is_leaf(&self, node: NodeId) -> bool {
        self.nodes.get(&node).is_some_and(|r| r.params.is_none())
    }

    pub fn interval(&self, node: NodeId) -> Interval {
        interval_of(node, self.domain)
    }

    /// All nodes with their records, parents before children.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &NodeRecord)> {
        self.nodes.iter().map(|(&n, r)| (n, r))
    }

    /// Internal nodes and their posterior split parameters.
    pub fn internal_nodes(&self) -> impl Iterator<Item = (NodeId, BetaParams)> + '_ {
        self.nodes
            .iter()
            .filter_map(|(&n, r)| r.params.map(|p| (n, p)))
    }

    pub fn internal_count(&self) -> usize {
        self.internal_nodes().count()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.len() - self.internal_count()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Leaves ordered left to right across the domain.
    pub fn leaves(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.leaf_count());
        let mut stack = vec![NodeId::ROOT];
        while let Some(node) = stack.pop() {
            if self.is_leaf(node) {
                out.push(node);
            } else {
                stack.push(node.right_child());
                stack.push(node.left_child());
            }
        }
        out
    }

    pub fn max_leaf_level(&self) -> u32 {
        self.nodes
            .iter()
            .filter(|(_, r)| r.params.is_none())
            .map(|(n, _)| n.level())
            .max()
            .unwrap_or(0)
    }

    /// Splits `leaf` after learning that `n_left` of its samples fall in its
    /// left child. `prior` is the split prior elicited for the leaf.
    pub fn split(
        &mut self,
        leaf: NodeId,
        n_left: u64,
        prior: BetaParams,
        round: u64,
    ) -> Result<()> {
        let parent_count = self.record(leaf)?.count;
        if !self.is_leaf(leaf) {
            return Err(Error::NotALeaf(leaf));
        }
        if n_left > parent_count {
            return Err(Error::InconsistentCount {
                answer: n_left,
                parent: parent_count,
            });
        }
        let n_right = parent_count - n_left;
        let child = |count| NodeRecord {
            count,
            params: None,
            created_round: round,
        };
        self.nodes.insert(leaf.left_child(), child(n_left));
        self.nodes.insert(leaf.right_child(), child(n_right));
        if let Some(r) = self.nodes.get_mut(&leaf) {
            r.params = Some(conjugate_update(prior, n_left, n_right));
        }
        Ok(())
    }

    /// Checks every structural invariant of an analysis tree.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::MalformedTree(m));
        match self.nodes.get(&NodeId::ROOT) {
            Some(r) if r.count == self.total_n => {}
            Some(r) => return bad(format!("root count {} != n {}", r.count, self.total_n)),
            None => return Err(Error::MissingNode(NodeId::ROOT)),
        }
        for (&node, rec) in &self.nodes {
            if let Ok(parent) = node.parent() {
                if !self.nodes.contains_key(&parent) {
                    return bad(format!("{node} present without its parent"));
                }
                if !self.nodes.contains_key(&node.sister()?) {
                    return bad(format!("{node} present without its sister"));
                }
            }
            let left = self.nodes.get(&node.left_child());
            match (left, rec.params) {
                (Some(l), Some(_)) => {
                    let r = self.record(node.right_child())?;
                    if l.count + r.count != rec.count {
                        return bad(format!("child counts of {node} do not add up"));
                    }
                }
                (None, None) => {}
                (Some(_), None) => return bad(format!("internal node {node} lacks parameters")),
                (None, Some(_)) => return bad(format!("leaf {node} carries parameters")),
            }
        }
        Ok(())
    }

    /// `(interval, mass)` for every leaf, left to right.
    pub fn leaf_masses(&self, masses: &MassTree) -> Vec<(Interval, f64)> {
        self.leaves()
            .into_iter()
            .map(|n| (self.interval(n), masses.get(n).unwrap_or(0.0)))
            .collect()
    }
}

/// Probability mass assigned to every node of an analysis tree.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MassTree {
    masses: BTreeMap<NodeId, f64>,
}

impl MassTree {
    pub fn get(&self, node: NodeId) -> Option<f64> {
        self.masses.get(&node).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.masses.iter().map(|(&n, &m)| (n, m))
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// Sum of masses over the leaves of `tree`.
    pub fn leaf_total(&self, tree: &AnalysisTree) -> f64 {
        tree.leaves().into_iter().filter_map(|n| self.get(n)).sum()
    }

    /// Propagates masses top-down, computing each child's share with `split`.
    fn propagate<F>(tree: &AnalysisTree, mut split: F) -> Result<MassTree>
    where
        F: FnMut(NodeId, BetaParams, f64) -> Result<(f64, f64)>,
    {
        let mut masses = BTreeMap::new();
        masses.insert(NodeId::ROOT, 1.0);
        // BTreeMap order is level-major, so parents come first.
        for (node, params) in tree.internal_nodes() {
            let m = masses[&node];
            let (left, right) = split(node, params, m)?;
            masses.insert(node.left_child(), left);
            masses.insert(node.right_child(), right);
        }
        Ok(MassTree { masses })
    }
}

/// Posterior mean mass of `node`: the product along its root path of `rho`
/// for left steps and `1 - rho` for right steps.
pub fn posterior_mean_mass(tree: &AnalysisTree, node: NodeId) -> Result<f64> {
    if !tree.contains(node) {
        return Err(Error::MissingNode(node));
    }
    let path = node.path_from_root();
    let mut mass = 1.0;
    for step in path.windows(2) {
        let (parent, child) = (step[0], step[1]);
        let params = tree
            .get(parent)
            .and_then(|r| r.params)
            .ok_or_else(|| Error::MalformedTree(format!("{parent} lacks parameters")))?;
        let rho = params.rho();
        mass *= if child.is_left() { rho } else { 1.0 - rho };
    }
    Ok(mass)
}

/// Posterior mean mass of every node.
pub fn mean_mass_tree(tree: &AnalysisTree) -> MassTree {
    MassTree::propagate(tree, |_, params, m| {
        let rho = params.rho();
        Ok((m * rho, m * (1.0 - rho)))
    })
    .expect("mean propagation is infallible")
}

/// One random mass allocation drawn from the tree's Pólya-tree law.
pub fn sample_mass_tree<R: Rng + ?Sized>(tree: &AnalysisTree, rng: &mut R) -> MassTree {
    MassTree::propagate(tree, |_, params, m| {
        let y = Beta::new(params.alpha(), params.beta())
            .expect("BetaParams are validated positive")
            .sample(rng);
        Ok((m * y, m * (1.0 - y)))
    })
    .expect("sampling propagation is infallible")
}

/// Node-wise average of `draws` independent mass allocations.
pub fn sample_average_mass_tree<R: Rng + ?Sized>(
    tree: &AnalysisTree,
    draws: usize,
    rng: &mut R,
) -> Result<MassTree> {
    if draws == 0 {
        return Err(Error::InvalidArgument(
            "need at least one draw to average".into(),
        ));
    }
    let mut acc: BTreeMap<NodeId, f64> = BTreeMap::new();
    for _ in 0..draws {
        for (n, m) in sample_mass_tree(tree, rng).iter() {
            *acc.entry(n).or_insert(0.0) += m;
        }
    }
    let scale = 1.0 / draws as f64;
    for m in acc.values_mut() {
        *m *= scale;
    }
    Ok(MassTree { masses: acc })
}
