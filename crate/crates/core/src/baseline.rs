//! Non-adaptive equal-width histogram.

use crate::error::{Error, Result};
use crate::estimate::{flat_estimate, DensityEstimate};
use crate::partition::Interval;
use crate::responder::CountingOracle;

/// Histogram of `k` equal-width bins, one counting query per bin.
pub fn nada_estimate<O>(oracle: &O, k: usize) -> Result<DensityEstimate>
where
    O: CountingOracle + ?Sized,
{
    if k == 0 {
        return Err(Error::InvalidArgument(
            "the query budget must be at least 1".into(),
        ));
    }
    let domain = oracle.domain();
    let n = oracle.total() as f64;
    let edge = |b: usize| {
        if b == k {
            domain.hi
        } else {
            domain.lo + domain.len() * (b as f64 / k as f64)
        }
    };
    let leaves = (0..k)
        .map(|b| {
            let bin = Interval::new(edge(b), edge(b + 1))?;
            Ok((bin, oracle.count_in(&bin)? as f64 / n))
        })
        .collect::<Result<Vec<_>>>()?;
    flat_estimate(&leaves)
}
