//! Density curves rendered from leaf masses.
//!
//! Three renderings share one input, the left-to-right list of leaf
//! intervals with their masses:
//!
//! * `Flat`: the histogram `mass / length` on each leaf.
//! * `Mid`: a frequency polygon through each leaf's midpoint.
//! * `Junc`: each leaf carries its value between two anchors that are pulled
//!   toward its neighbours by an amount that grows with its length relative
//!   to the longest leaf. The curve is flat between a leaf's own anchors,
//!   linear between facing anchors of neighbouring leaves and flat out to the
//!   domain edges.
//!
//! With equal-length leaves `Junc` and `Mid` produce the same curve.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::Interval;

const MASS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimateMode {
    Flat,
    Mid,
    Junc,
}

impl fmt::Display for EstimateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimateMode::Flat => "flat",
            EstimateMode::Mid => "mid",
            EstimateMode::Junc => "junc",
        })
    }
}

impl FromStr for EstimateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat" => Ok(EstimateMode::Flat),
            "mid" => Ok(EstimateMode::Mid),
            "junc" => Ok(EstimateMode::Junc),
            other => Err(Error::InvalidArgument(format!(
                "unknown estimate mode {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    /// `values[i]` on `[edges[i], edges[i + 1])`.
    Steps { edges: Vec<f64>, values: Vec<f64> },
    /// Piecewise linear through `(xs[i], ys[i])`, constant beyond the ends.
    Polyline { xs: Vec<f64>, ys: Vec<f64> },
}

/// A piecewise density on a bounded domain. Zero outside the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    mode: EstimateMode,
    domain: Interval,
    shape: Shape,
}

impl DensityEstimate {
    pub fn mode(&self) -> EstimateMode {
        self.mode
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        if !(x >= self.domain.lo && x <= self.domain.hi) {
            return 0.0;
        }
        match &self.shape {
            Shape::Steps { edges, values } => {
                let inner = &edges[1..edges.len() - 1];
                values[inner.partition_point(|&e| e <= x)]
            }
            Shape::Polyline { xs, ys } => {
                let i = xs.partition_point(|&a| a <= x);
                if i == 0 {
                    ys[0]
                } else if i == xs.len() {
                    ys[xs.len() - 1]
                } else {
                    let (x0, x1) = (xs[i - 1], xs[i]);
                    let (y0, y1) = (ys[i - 1], ys[i]);
                    let t = (x - x0) / (x1 - x0);
                    y0 + t * (y1 - y0)
                }
            }
        }
    }

    /// Exact integral over the domain.
    pub fn integral(&self) -> f64 {
        match &self.shape {
            Shape::Steps { edges, values } => edges
                .windows(2)
                .zip(values)
                .map(|(e, v)| (e[1] - e[0]) * v)
                .sum(),
            Shape::Polyline { xs, ys } => {
                let head = (xs[0] - self.domain.lo) * ys[0];
                let tail = (self.domain.hi - xs[xs.len() - 1]) * ys[ys.len() - 1];
                let body: f64 = xs
                    .windows(2)
                    .zip(ys.windows(2))
                    .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
                    .sum();
                head + body + tail
            }
        }
    }

    /// The same curve scaled to integrate to one.
    pub fn renormalized(&self) -> DensityEstimate {
        let total = self.integral();
        if total.is_nan() || total <= 0.0 {
            return self.clone();
        }
        let scale = |v: &mut Vec<f64>| v.iter_mut().for_each(|y| *y /= total);
        let mut out = self.clone();
        match &mut out.shape {
            Shape::Steps { values, .. } => scale(values),
            Shape::Polyline { ys, .. } => scale(ys),
        }
        out
    }
}

/// Checks that `leaves` tile a contiguous interval with non-negative masses
/// summing to one.
fn check_leaves(leaves: &[(Interval, f64)]) -> Result<Interval> {
    let (first, last) = match (leaves.first(), leaves.last()) {
        (Some(f), Some(l)) => (f.0, l.0),
        _ => return Err(Error::NonTiling("no leaves".into())),
    };
    for (iv, mass) in leaves {
        if iv.is_empty() {
            return Err(Error::NonTiling(format!("empty leaf at {}", iv.lo)));
        }
        if !(*mass >= 0.0 && mass.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "leaf mass {mass} is not a probability"
            )));
        }
    }
    if let Some(w) = leaves.windows(2).find(|w| w[0].0.hi != w[1].0.lo) {
        return Err(Error::NonTiling(format!(
            "gap or overlap between {} and {}",
            w[0].0.hi, w[1].0.lo
        )));
    }
    let total: f64 = leaves.iter().map(|(_, m)| m).sum();
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::InvalidArgument(format!(
            "leaf masses sum to {total}, not 1"
        )));
    }
    Interval::new(first.lo, last.hi)
}

/// Histogram with density `mass / length` on each leaf.
pub fn flat_estimate(leaves: &[(Interval, f64)]) -> Result<DensityEstimate> {
    let domain = check_leaves(leaves)?;
    let mut edges: Vec<f64> = leaves.iter().map(|(iv, _)| iv.lo).collect();
    edges.push(domain.hi);
    let values = leaves.iter().map(|(iv, m)| m / iv.len()).collect();
    Ok(DensityEstimate {
        mode: EstimateMode::Flat,
        domain,
        shape: Shape::Steps { edges, values },
    })
}

/// Anchors `(j_TE, j_ET)` for adjacent leaves `t = [t0, t1)` and
/// `e = [t1, e1)`, given the longest leaf length `max_len`.
pub fn junction_points(t: Interval, e: Interval, max_len: f64) -> Result<(f64, f64)> {
    if t.hi != e.lo {
        return Err(Error::NotAdjacent {
            t_lo: t.lo,
            t_hi: t.hi,
            e_lo: e.lo,
            e_hi: e.hi,
        });
    }
    let (lt, le) = (t.len(), e.len());
    let slack = max_len * 1e-12;
    if !(max_len > 0.0 && lt <= max_len + slack && le <= max_len + slack) {
        return Err(Error::InvalidArgument(format!(
            "leaf lengths {lt} and {le} must not exceed the maximum length {max_len}"
        )));
    }
    let overlap = lt.min(le);
    let (wt, we) = (lt / max_len, le / max_len);
    let j_te = t.hi - wt * (overlap / 2.0) - (1.0 - wt) * (lt / 2.0);
    let j_et = e.lo + we * (overlap / 2.0) + (1.0 - we) * (le / 2.0);
    Ok((j_te, j_et))
}

/// Interpolated curve through per-leaf anchors, in `Mid` or `Junc` mode.
pub fn interpolated_estimate(
    leaves: &[(Interval, f64)],
    mode: EstimateMode,
) -> Result<DensityEstimate> {
    let domain = check_leaves(leaves)?;
    let mut xs = Vec::with_capacity(2 * leaves.len());
    let mut ys = Vec::with_capacity(2 * leaves.len());
    match mode {
        EstimateMode::Flat => return flat_estimate(leaves),
        EstimateMode::Mid => {
            for (iv, m) in leaves {
                xs.push(iv.midpoint());
                ys.push(m / iv.len());
            }
        }
        EstimateMode::Junc => {
            let max_len = leaves.iter().map(|(iv, _)| iv.len()).fold(0.0, f64::max);
            let junctions = leaves
                .windows(2)
                .map(|w| junction_points(w[0].0, w[1].0, max_len))
                .collect::<Result<Vec<_>>>()?;
            for (i, (iv, m)) in leaves.iter().enumerate() {
                let v = m / iv.len();
                let left = i.checked_sub(1).map(|j| junctions[j].1);
                let right = junctions.get(i).map(|j| j.0);
                match (left, right) {
                    (None, None) => {
                        xs.push(iv.midpoint());
                        ys.push(v);
                    }
                    (a, b) => {
                        for x in a.into_iter().chain(b) {
                            xs.push(x);
                            ys.push(v);
                        }
                    }
                }
            }
        }
    }
    Ok(DensityEstimate {
        mode,
        domain,
        shape: Shape::Polyline { xs, ys },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn flat_examples() {
        let e = flat_estimate(&[(iv(-25.0, 25.0), 1.0)]).unwrap();
        assert_eq!(e.evaluate(0.0), 0.02);
        assert_eq!(e.evaluate(25.0), 0.02);
        assert_eq!(e.evaluate(25.1), 0.0);

        let e = flat_estimate(&[(iv(0.0, 0.5), 0.25), (iv(0.5, 1.0), 0.75)]).unwrap();
        assert_eq!(e.evaluate(0.2), 0.5);
        assert_eq!(e.evaluate(0.5), 1.5);
        assert_eq!(e.evaluate(1.0), 1.5);
        assert_eq!(e.integral(), 1.0);
    }

    #[test]
    fn flat_rejects_bad_leaves() {
        assert!(matches!(
            flat_estimate(&[(iv(0.0, 0.5), 0.5), (iv(0.6, 1.0), 0.5)]),
            Err(Error::NonTiling(_))
        ));
        assert!(matches!(flat_estimate(&[]), Err(Error::NonTiling(_))));
        assert!(flat_estimate(&[(iv(0.0, 0.5), 0.5), (iv(0.5, 1.0), 0.2)]).is_err());
        assert!(interpolated_estimate(
            &[(iv(0.0, 0.5), 0.5), (iv(0.4, 1.0), 0.5)],
            EstimateMode::Junc
        )
        .is_err());
    }

    #[test]
    fn junction_examples() {
        assert_eq!(
            junction_points(iv(0.0, 1.0), iv(1.0, 2.0), 1.0).unwrap(),
            (0.5, 1.5)
        );
        assert_eq!(
            junction_points(iv(0.0, 2.0), iv(2.0, 3.0), 2.0).unwrap(),
            (1.5, 2.5)
        );
        assert!(matches!(
            junction_points(iv(0.0, 1.0), iv(1.5, 2.0), 1.0),
            Err(Error::NotAdjacent { .. })
        ));
        assert!(junction_points(iv(0.0, 2.0), iv(2.0, 3.0), 1.0).is_err());
    }

    #[test]
    fn mid_two_leaves() {
        let leaves = [(iv(0.0, 0.5), 0.25), (iv(0.5, 1.0), 0.75)];
        let e = interpolated_estimate(&leaves, EstimateMode::Mid).unwrap();
        assert_eq!(e.evaluate(0.25), 0.5);
        assert_eq!(e.evaluate(0.75), 1.5);
        assert_eq!(e.evaluate(0.5), 1.0);
        assert_eq!(e.evaluate(0.0), 0.5);
        assert_eq!(e.evaluate(1.0), 1.5);
        assert_eq!(e.integral(), 1.0);
    }

    #[test]
    fn single_leaf_interpolation_is_flat() {
        let leaves = [(iv(-25.0, 25.0), 1.0)];
        let flat = flat_estimate(&leaves).unwrap();
        for mode in [EstimateMode::Mid, EstimateMode::Junc] {
            let e = interpolated_estimate(&leaves, mode).unwrap();
            for x in [-25.0, -3.0, 0.0, 24.9, 25.0] {
                assert_eq!(e.evaluate(x), flat.evaluate(x));
            }
        }
    }

    #[test]
    fn junc_shifts_anchors_of_long_leaves() {
        // [0,2) next to [2,3) and [3,4): the long leaf's right anchor moves
        // from its midpoint 1.0 to 1.5.
        let leaves = [
            (iv(0.0, 2.0), 0.4),
            (iv(2.0, 3.0), 0.3),
            (iv(3.0, 4.0), 0.3),
        ];
        let e = interpolated_estimate(&leaves, EstimateMode::Junc).unwrap();
        assert_eq!(e.evaluate(0.1), 0.2);
        assert_eq!(e.evaluate(1.5), 0.2);
        assert_relative_eq!(e.evaluate(2.0), 0.25, epsilon = 1e-15);
        assert_relative_eq!(e.evaluate(2.5), 0.3, epsilon = 1e-15);
        assert_relative_eq!(e.evaluate(3.9), 0.3, epsilon = 1e-15);
        let mid = interpolated_estimate(&leaves, EstimateMode::Mid).unwrap();
        assert_relative_eq!(mid.evaluate(1.5), 0.2 + 0.1 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn renormalize_scales_to_unit_mass() {
        let leaves = [
            (iv(0.0, 2.0), 0.8),
            (iv(2.0, 2.5), 0.1),
            (iv(2.5, 3.0), 0.1),
        ];
        let e = interpolated_estimate(&leaves, EstimateMode::Mid).unwrap();
        assert_relative_eq!(e.integral(), 0.925, epsilon = 1e-12);
        assert_relative_eq!(e.renormalized().integral(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mode_parses() {
        assert_eq!("junc".parse::<EstimateMode>().unwrap(), EstimateMode::Junc);
        assert!("nope".parse::<EstimateMode>().is_err());
        assert_eq!(EstimateMode::Mid.to_string(), "mid");
    }

    /// Random dyadic tiling of [0, 1) with random masses.
    fn arb_leaves() -> impl Strategy<Value = Vec<(Interval, f64)>> {
        prop::collection::vec((1u32..6, 0.01f64..1.0), 1..30).prop_map(|parts| {
            let mut out = Vec::new();
            let mut lo = 0.0f64;
            for (depth, w) in parts {
                let len = 0.5f64.powi(depth as i32);
                if lo + len > 1.0 {
                    break;
                }
                out.push((lo, lo + len, w));
                lo += len;
            }
            if lo < 1.0 {
                out.push((lo, 1.0, 0.5));
            }
            let total: f64 = out.iter().map(|t| t.2).sum();
            out.into_iter()
                .map(|(a, b, w)| (Interval::new(a, b).unwrap(), w / total))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn flat_integrates_to_one(leaves in arb_leaves()) {
            let e = flat_estimate(&leaves).unwrap();
            prop_assert!((e.integral() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn interpolated_is_continuous_and_nonnegative(leaves in arb_leaves(), mode in prop::sample::select(vec![EstimateMode::Mid, EstimateMode::Junc])) {
            let e = interpolated_estimate(&leaves, mode).unwrap();
            let max_v = leaves.iter().map(|(iv, m)| m / iv.len()).fold(0.0, f64::max);
            let steps = 4000;
            let mut prev = e.evaluate(0.0);
            for i in 1..=steps {
                let v = e.evaluate(i as f64 / steps as f64);
                prop_assert!(v >= 0.0);
                // Slopes are bounded by max value / (shortest leaf / 2).
                prop_assert!((v - prev).abs() <= max_v * 64.0 / steps as f64 + 1e-12);
                prev = v;
            }
        }

        #[test]
        fn junc_equals_mid_on_equal_lengths(level in 0u32..7, weights in prop::collection::vec(0.01f64..1.0, 128), x in 0.0f64..=1.0) {
            let cells = 1usize << level;
            let total: f64 = weights[..cells].iter().sum();
            let leaves: Vec<_> = (0..cells)
                .map(|i| (Interval::new(i as f64 / cells as f64, (i + 1) as f64 / cells as f64).unwrap(), weights[i] / total))
                .collect();
            let mid = interpolated_estimate(&leaves, EstimateMode::Mid).unwrap();
            let junc = interpolated_estimate(&leaves, EstimateMode::Junc).unwrap();
            prop_assert!((mid.evaluate(x) - junc.evaluate(x)).abs() <= 1e-12);
        }
    }
}
