use std::collections::BTreeMap;

use super::config::SweepMode;
use super::sweep::TrialResult;

/// Linear interpolation between order statistics of sorted data
/// (`h = (n - 1) p`). `p` in `[0, 1]`.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of empty data");
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Location and spread of one metric over the trials of a group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation; zero for a single trial.
    pub std: f64,
    pub median: f64,
    pub p5: f64,
    pub p25: f64,
    pub p75: f64,
    pub p95: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len() as f64;
        let mean = sorted.iter().sum::<f64>() / n;
        let std = if sorted.len() > 1 {
            (sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Stats {
            count: sorted.len(),
            mean,
            std,
            median: percentile(&sorted, 0.5),
            p5: percentile(&sorted, 0.05),
            p25: percentile(&sorted, 0.25),
            p75: percentile(&sorted, 0.75),
            p95: percentile(&sorted, 0.95),
        })
    }

    fn named(&self) -> [(&'static str, f64); 8] {
        [
            ("count", self.count as f64),
            ("mean", self.mean),
            ("std", self.std),
            ("median", self.median),
            ("p5", self.p5),
            ("p25", self.p25),
            ("p75", self.p75),
            ("p95", self.p95),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub k: usize,
    pub mode: SweepMode,
    /// `<metric>_<stat>`, e.g. `mse_mean` or `tv_p95`.
    pub stat: String,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub groups: BTreeMap<(usize, SweepMode), (Stats, Stats)>,
    /// Groups with no successful trial.
    pub omitted: Vec<(usize, SweepMode)>,
}

impl Summary {
    pub fn get(&self, k: usize, mode: SweepMode) -> Option<&(Stats, Stats)> {
        self.groups.get(&(k, mode))
    }

    pub fn mse(&self, k: usize, mode: SweepMode) -> Option<&Stats> {
        self.get(k, mode).map(|g| &g.0)
    }

    pub fn tv(&self, k: usize, mode: SweepMode) -> Option<&Stats> {
        self.get(k, mode).map(|g| &g.1)
    }

    pub fn rows(&self) -> Vec<SummaryRow> {
        let mut rows = Vec::new();
        for (&(k, mode), (mse, tv)) in &self.groups {
            for (metric, stats) in [("mse", mse), ("tv", tv)] {
                for (name, value) in stats.named() {
                    rows.push(SummaryRow {
                        k,
                        mode,
                        stat: format!("{metric}_{name}"),
                        value,
                    });
                }
            }
        }
        rows
    }
}

/// Per-`(k, mode)` statistics of MSE and TV over successful trials.
pub fn aggregate(results: &[TrialResult]) -> Summary {
    let mut buckets: BTreeMap<(usize, SweepMode), (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in results {
        let entry = buckets.entry((r.k, r.mode)).or_default();
        if r.is_ok() && r.mse.is_finite() && r.tv.is_finite() {
            entry.0.push(r.mse);
            entry.1.push(r.tv);
        }
    }
    let mut summary = Summary::default();
    for (key, (mse, tv)) in buckets {
        match (Stats::of(&mse), Stats::of(&tv)) {
            (Some(m), Some(t)) => {
                summary.groups.insert(key, (m, t));
            }
            _ => summary.omitted.push(key),
        }
    }
    summary
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Duration;

    fn row(k: usize, mode: SweepMode, trial: usize, mse: f64) -> TrialResult {
        TrialResult {
            k,
            mode,
            trial,
            seed: 0,
            mse,
            tv: mse / 2.0,
            wall_time: Duration::ZERO,
            error: None,
        }
    }

    #[test]
    fn single_trial() {
        let s = Stats::of(&[3.5]).unwrap();
        assert_eq!(
            (s.mean, s.median, s.std, s.p5, s.p95),
            (3.5, 3.5, 0.0, 3.5, 3.5)
        );
    }

    #[test]
    fn hand_computed_stats() {
        let s = Stats::of(&[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(s.mean, 2.5);
        assert_eq!(s.median, 2.5);
        assert_eq!(s.p25, 1.75);
        assert!((s.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        let c = Stats::of(&[7.0; 9]).unwrap();
        assert_eq!((c.p5, c.p25, c.p75, c.p95), (7.0, 7.0, 7.0, 7.0));
        assert!(Stats::of(&[]).is_none());
    }

    #[test]
    fn groups_and_omissions() {
        let mut rows = vec![
            row(5, SweepMode::Nada, 0, 1.0),
            row(5, SweepMode::Nada, 1, 3.0),
            row(5, SweepMode::Junc, 0, 0.5),
            row(9, SweepMode::Junc, 0, f64::NAN),
        ];
        rows[3].error = Some("boom".into());
        let s = aggregate(&rows);
        assert_eq!(s.mse(5, SweepMode::Nada).unwrap().mean, 2.0);
        assert_eq!(s.tv(5, SweepMode::Nada).unwrap().mean, 1.0);
        assert_eq!(s.mse(5, SweepMode::Junc).unwrap().count, 1);
        assert_eq!(s.omitted, vec![(9, SweepMode::Junc)]);
        let flat = s.rows();
        assert_eq!(flat.len(), 2 * 2 * 8);
        assert_eq!(flat[0].stat, "mse_count");
    }
}
