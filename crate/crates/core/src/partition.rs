//! Dyadic nested partition of a bounded interval.
//!
//! Node `(l, s)` covers the `s`-th of the `2^l` equal-width cells at level
//! `l`. Every cell splits at its midpoint into `(l+1, 2s)` and `(l+1, 2s+1)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deepest addressable level. Cell widths stay exactly representable as
/// `L / 2^l` in `f64` well past this.
pub const MAX_LEVEL: u32 = 62;

/// Address of a cell in the dyadic tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId {
    level: u32,
    index: u64,
}

impl NodeId {
    pub const ROOT: NodeId = NodeId { level: 0, index: 0 };

    pub fn new(level: u32, index: u64) -> Result<Self> {
        if level > MAX_LEVEL || index >= (1u64 << level) {
            return Err(Error::InvalidNode { level, index });
        }
        Ok(NodeId { level, index })
    }

    #[inline]
    pub fn level(self) -> u32 {
        self.level
    }

    #[inline]
    pub fn index(self) -> u64 {
        self.index
    }

    #[inline]
    pub fn is_root(self) -> bool {
        self.level == 0
    }

    #[inline]
    pub fn is_left(self) -> bool {
        self.level > 0 && self.index.is_multiple_of(2)
    }

    pub fn parent(self) -> Result<NodeId> {
        if self.is_root() {
            return Err(Error::RootHasNoParent);
        }
        Ok(NodeId {
            level: self.level - 1,
            index: self.index / 2,
        })
    }

    pub fn sister(self) -> Result<NodeId> {
        if self.is_root() {
            return Err(Error::RootHasNoParent);
        }
        Ok(NodeId {
            level: self.level,
            index: self.index ^ 1,
        })
    }

    /// Panics past [`MAX_LEVEL`].
    pub fn left_child(self) -> NodeId {
        assert!(self.level < MAX_LEVEL, "dyadic tree depth exceeded");
        NodeId {
            level: self.level + 1,
            index: self.index * 2,
        }
    }

    /// Panics past [`MAX_LEVEL`].
    pub fn right_child(self) -> NodeId {
        assert!(self.level < MAX_LEVEL, "dyadic tree depth exceeded");
        NodeId {
            level: self.level + 1,
            index: self.index * 2 + 1,
        }
    }

    /// Nodes from the root down to `self`, inclusive.
    pub fn path_from_root(self) -> Vec<NodeId> {
        let mut path = Vec::with_capacity(self.level as usize + 1);
        let mut node = self;
        path.push(node);
        while let Ok(p) = node.parent() {
            path.push(p);
            node = p;
        }
        path.reverse();
        path
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.level, self.index)
    }
}

/// Half-open interval `[lo, hi)` in domain units.
///
/// A cell whose upper end coincides with the domain's upper end is treated
/// as closed there by the responder and the estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    /// Requires finite endpoints with `lo < hi`.
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    /// `[lo, lo)`, an interval containing nothing. Only meaningful as a query.
    pub fn empty_at(lo: f64) -> Self {
        Interval { lo, hi: lo }
    }

    /// Symmetric domain `[-half_width, half_width)`.
    pub fn symmetric(half_width: f64) -> Result<Self> {
        Interval::new(-half_width, half_width)
    }

    #[inline]
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    #[inline]
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        other.lo >= self.lo && other.hi <= self.hi
    }
}

/// Geometry of `node` inside `domain`.
pub fn interval_of(node: NodeId, domain: Interval) -> Interval {
    let width = domain.len();
    let cells = (1u64 << node.level) as f64;
    let lo = domain.lo + width * (node.index as f64 / cells);
    let hi = if node.index + 1 == 1u64 << node.level {
        domain.hi
    } else {
        domain.lo + width * ((node.index + 1) as f64 / cells)
    };
    Interval { lo, hi }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn n(l: u32, s: u64) -> NodeId {
        NodeId::new(l, s).unwrap()
    }

    #[test]
    fn interval_examples() {
        let d = Interval::new(-25.0, 25.0).unwrap();
        assert_eq!(interval_of(NodeId::ROOT, d), d);
        assert_eq!(interval_of(n(1, 0), d), Interval::new(-25.0, 0.0).unwrap());
        let d = Interval::new(0.0, 8.0).unwrap();
        assert_eq!(interval_of(n(3, 5), d), Interval::new(5.0, 6.0).unwrap());
    }

    #[test]
    fn navigation_examples() {
        assert_eq!(n(3, 5).parent().unwrap(), n(2, 2));
        assert_eq!(n(2, 2).left_child(), n(3, 4));
        assert_eq!(n(3, 4).sister().unwrap(), n(3, 5));
        assert_eq!(n(3, 5).sister().unwrap(), n(3, 4));
    }

    #[test]
    fn root_has_no_parent() {
        assert!(matches!(NodeId::ROOT.parent(), Err(Error::RootHasNoParent)));
        assert!(matches!(NodeId::ROOT.sister(), Err(Error::RootHasNoParent)));
    }

    #[test]
    fn rejects_out_of_range_index() {
        assert!(NodeId::new(2, 4).is_err());
        assert!(NodeId::new(0, 1).is_err());
        assert!(NodeId::new(MAX_LEVEL + 1, 0).is_err());
    }

    #[test]
    fn rejects_degenerate_domain() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn path_from_root_walks_ancestors() {
        assert_eq!(
            n(3, 5).path_from_root(),
            vec![NodeId::ROOT, n(1, 1), n(2, 2), n(3, 5)]
        );
    }

    #[test]
    fn top_level_tiles_domain() {
        let d = Interval::new(-25.0, 25.0).unwrap();
        let level = 9;
        let cells: Vec<_> = (0..1u64 << level)
            .map(|s| interval_of(n(level, s), d))
            .collect();
        assert_eq!(cells[0].lo, d.lo);
        assert_eq!(cells.last().unwrap().hi, d.hi);
        for w in cells.windows(2) {
            assert_eq!(w[0].hi, w[1].lo);
        }
        let total: f64 = cells.iter().map(Interval::len).sum();
        assert!((total - d.len()).abs() < 1e-12);
    }

    fn arb_node() -> impl Strategy<Value = NodeId> {
        (1u32..40).prop_flat_map(|l| (Just(l), 0..(1u64 << l)).prop_map(|(l, s)| n(l, s)))
    }

    proptest! {
        #[test]
        fn children_partition_parent(node in arb_node(), lo in -100.0f64..100.0, w in 0.5f64..200.0) {
            let d = Interval::new(lo, lo + w).unwrap();
            let p = node.parent().unwrap();
            let (a, b) = (interval_of(p.left_child(), d), interval_of(p.right_child(), d));
            let whole = interval_of(p, d);
            prop_assert_eq!(a.lo, whole.lo);
            prop_assert_eq!(a.hi, b.lo);
            prop_assert_eq!(b.hi, whole.hi);
            let half = d.len() / (1u64 << node.level()) as f64;
            prop_assert!((interval_of(node, d).len() - half).abs() <= 1e-9 * d.len());
        }

        #[test]
        fn navigation_round_trips(node in arb_node()) {
            prop_assert_eq!(node.left_child().parent().unwrap(), node);
            prop_assert_eq!(node.right_child().parent().unwrap(), node);
            prop_assert_eq!(node.sister().unwrap().sister().unwrap(), node);
            let p = node.parent().unwrap();
            prop_assert_eq!(p.left_child().sister().unwrap(), p.right_child());
        }
    }
}
