//! Squared and total-variation error between two densities by trapezoid
//! quadrature on a uniform grid.

use serde::{Deserialize, Serialize};

use crate::partition::Interval;

/// Default quadrature grid size.
pub const DEFAULT_GRID_POINTS: usize = 1 << 17;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub mse: f64,
    pub tv: f64,
}

impl MetricReport {
    /// Both metrics from values already sampled on the same uniform grid
    /// over `domain`.
    pub fn from_grid(truth: &[f64], estimate: &[f64], domain: Interval) -> MetricReport {
        let dx = grid_step(domain, truth.len());
        MetricReport {
            mse: trapezoid(truth, estimate, dx, |d| d * d),
            tv: 0.5 * trapezoid(truth, estimate, dx, f64::abs),
        }
    }
}

/// `grid_points` equally spaced points covering `domain` including both ends.
pub fn uniform_grid(domain: Interval, grid_points: usize) -> Vec<f64> {
    assert!(
        grid_points >= 2,
        "a quadrature grid needs at least two points"
    );
    let dx = grid_step(domain, grid_points);
    (0..grid_points)
        .map(|i| {
            if i + 1 == grid_points {
                domain.hi
            } else {
                domain.lo + i as f64 * dx
            }
        })
        .collect()
}

fn grid_step(domain: Interval, grid_points: usize) -> f64 {
    domain.len() / (grid_points - 1) as f64
}

fn trapezoid(a: &[f64], b: &[f64], dx: f64, f: impl Fn(f64) -> f64) -> f64 {
    assert_eq!(a.len(), b.len(), "grids differ in length");
    let n = a.len();
    let inner: f64 = (1..n - 1).map(|i| f(a[i] - b[i])).sum();
    dx * (inner + 0.5 * (f(a[0] - b[0]) + f(a[n - 1] - b[n - 1])))
}

/// Integral of `(p - q)^2` over `domain`.
pub fn mse<P, Q>(p: P, q: Q, domain: Interval, grid_points: usize) -> f64
where
    P: Fn(f64) -> f64,
    Q: Fn(f64) -> f64,
{
    let xs = uniform_grid(domain, grid_points);
    let a: Vec<f64> = xs.iter().map(|&x| p(x)).collect();
    let b: Vec<f64> = xs.iter().map(|&x| q(x)).collect();
    MetricReport::from_grid(&a, &b, domain).mse
}

/// Half the integral of `|p - q|` over `domain`.
pub fn tv<P, Q>(p: P, q: Q, domain: Interval, grid_points: usize) -> f64
where
    P: Fn(f64) -> f64,
    Q: Fn(f64) -> f64,
{
    let xs = uniform_grid(domain, grid_points);
    let a: Vec<f64> = xs.iter().map(|&x| p(x)).collect();
    let b: Vec<f64> = xs.iter().map(|&x| q(x)).collect();
    MetricReport::from_grid(&a, &b, domain).tv
}
