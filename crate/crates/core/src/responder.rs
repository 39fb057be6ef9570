//! The data holder: a sorted sample set answering counting queries exactly.

use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};
use crate::partition::Interval;

/// Anything that can answer "how many samples fall in this interval".
pub trait CountingOracle {
    fn total(&self) -> u64;

    fn domain(&self) -> Interval;

    fn count_in(&self, interval: &Interval) -> Result<u64>;

    /// Empirical mean of the interval's indicator.
    fn fraction_in(&self, interval: &Interval) -> Result<f64> {
        Ok(self.count_in(interval)? as f64 / self.total() as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<f64>,
    domain: Interval,
}

impl Dataset {
    /// Sorts `samples`; every one must lie in the closed domain.
    pub fn new(mut samples: Vec<f64>, domain: Interval) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument("dataset is empty".into()));
        }
        if let Some(&x) = samples
            .iter()
            .find(|&&x| !(x >= domain.lo && x <= domain.hi))
        {
            return Err(Error::SampleOutsideDomain(x));
        }
        samples.sort_by(f64::total_cmp);
        Ok(Dataset { samples, domain })
    }

    /// One number per non-blank line; `#` starts a comment.
    pub fn from_reader<R: BufRead>(reader: R, domain: Interval, origin: &Path) -> Result<Self> {
        let mut samples = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(origin, e))?;
            let text = line.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let x: f64 = text.parse().map_err(|_| Error::Parse {
                path: origin.to_path_buf(),
                message: format!("line {}: not a number: {text:?}", lineno + 1),
            })?;
            samples.push(x);
        }
        Dataset::new(samples, domain)
    }

    pub fn from_path(path: &Path, domain: Interval) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Dataset::from_reader(std::io::BufReader::new(file), domain, path)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

impl CountingOracle for Dataset {
    fn total(&self) -> u64 {
        self.samples.len() as u64
    }

    fn domain(&self) -> Interval {
        self.domain
    }

    /// Samples with `lo <= x < hi`, or `x <= hi` when `hi` is the domain's
    /// upper end.
    fn count_in(&self, interval: &Interval) -> Result<u64> {
        if !(interval.lo >= self.domain.lo && interval.hi <= self.domain.hi) {
            return Err(Error::OutsideDomain {
                lo: interval.lo,
                hi: interval.hi,
            });
        }
        if interval.is_empty() {
            return Ok(0);
        }
        let start = self.samples.partition_point(|&x| x < interval.lo);
        let end = if interval.hi == self.domain.hi {
            self.samples.len()
        } else {
            self.samples.partition_point(|&x| x < interval.hi)
        };
        Ok((end - start) as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{interval_of, NodeId};
    use proptest::prelude::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn count_examples() {
        let d = Dataset::new(vec![3.0, 1.0, 2.0], iv(0.0, 4.0)).unwrap();
        assert_eq!(d.count_in(&iv(1.5, 3.1)).unwrap(), 2);
        assert_eq!(d.count_in(&iv(0.0, 4.0)).unwrap(), 3);
        assert_eq!(d.count_in(&Interval::empty_at(2.0)).unwrap(), 0);
        assert_eq!(d.samples(), &[1.0, 2.0, 3.0]);
        assert_eq!(d.fraction_in(&iv(0.0, 2.0)).unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn upper_domain_edge_is_closed() {
        let d = Dataset::new(vec![0.0, 1.0, 4.0], iv(0.0, 4.0)).unwrap();
        assert_eq!(d.count_in(&iv(2.0, 4.0)).unwrap(), 1);
        assert_eq!(d.count_in(&iv(0.0, 1.0)).unwrap(), 1);
    }

    #[test]
    fn rejects_out_of_domain() {
        let d = Dataset::new(vec![1.0], iv(0.0, 4.0)).unwrap();
        assert!(matches!(
            d.count_in(&iv(-1.0, 1.0)),
            Err(Error::OutsideDomain { .. })
        ));
        assert!(matches!(
            Dataset::new(vec![5.0], iv(0.0, 4.0)),
            Err(Error::SampleOutsideDomain(_))
        ));
        assert!(Dataset::new(vec![], iv(0.0, 4.0)).is_err());
    }

    #[test]
    fn reads_newline_delimited_text() {
        let text = "# header\n0.5\n\n  1.25 \n2 # trailing\n";
        let d = Dataset::from_reader(text.as_bytes(), iv(0.0, 4.0), Path::new("mem")).unwrap();
        assert_eq!(d.samples(), &[0.5, 1.25, 2.0]);
        let err = Dataset::from_reader("1\nabc\n".as_bytes(), iv(0.0, 4.0), Path::new("mem"));
        assert!(matches!(err, Err(Error::Parse { .. })));
    }

    proptest! {
        #[test]
        fn dyadic_counts_are_additive(
            xs in prop::collection::vec(-10.0f64..=10.0, 1..200),
            level in 1u32..12,
            idx in any::<u64>(),
        ) {
            let domain = iv(-10.0, 10.0);
            let d = Dataset::new(xs, domain).unwrap();
            let node = NodeId::new(level, idx % (1u64 << level)).unwrap();
            let p = node.parent().unwrap();
            let whole = d.count_in(&interval_of(p, domain)).unwrap();
            let l = d.count_in(&interval_of(p.left_child(), domain)).unwrap();
            let r = d.count_in(&interval_of(p.right_child(), domain)).unwrap();
            prop_assert_eq!(l + r, whole);
            prop_assert_eq!(d.count_in(&domain).unwrap(), d.total());
        }
    }
}
