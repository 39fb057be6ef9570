use std::fs::File;
use std::path::Path;
use std::time::Duration;

use serde::Deserialize;

use super::config::SweepMode;
use super::summary::Summary;
use super::sweep::TrialResult;
use crate::error::{Error, Result};

/// Nine significant digits in scientific notation; `NaN` stays `NaN`.
pub fn format_sig9(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.8e}")
    } else {
        x.to_string()
    }
}

fn create(path: &Path) -> Result<csv::Writer<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn finish(mut w: csv::Writer<File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

/// One row per trial and mode: `k,mode,trial,seed,mse,tv,error`.
pub fn write_trials(rows: &[TrialResult], path: &Path) -> Result<()> {
    let mut w = create(path)?;
    let csv_err = |e| Error::csv(path, e);
    w.write_record(["k", "mode", "trial", "seed", "mse", "tv", "error"])
        .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.k.to_string(),
            r.mode.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            format_sig9(r.mse),
            format_sig9(r.tv),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    finish(w, path)
}

/// Wall-clock times, kept apart from the reproducible trial table.
pub fn write_timings(rows: &[TrialResult], path: &Path) -> Result<()> {
    let mut w = create(path)?;
    let csv_err = |e| Error::csv(path, e);
    w.write_record(["k", "mode", "trial", "wall_ms"])
        .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.k.to_string(),
            r.mode.to_string(),
            r.trial.to_string(),
            format!("{:.3}", r.wall_time.as_secs_f64() * 1e3),
        ])
        .map_err(csv_err)?;
    }
    finish(w, path)
}

#[derive(Deserialize)]
struct TrialRow {
    k: usize,
    mode: SweepMode,
    trial: usize,
    seed: u64,
    mse: f64,
    tv: f64,
    error: String,
}

/// Reads a table written by [`write_trials`].
pub fn read_trials(path: &Path) -> Result<Vec<TrialResult>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    csv::Reader::from_reader(file)
        .deserialize::<TrialRow>()
        .map(|row| {
            let r = row.map_err(|e| Error::csv(path, e))?;
            Ok(TrialResult {
                k: r.k,
                mode: r.mode,
                trial: r.trial,
                seed: r.seed,
                mse: r.mse,
                tv: r.tv,
                wall_time: Duration::ZERO,
                error: (!r.error.is_empty()).then_some(r.error),
            })
        })
        .collect()
}

/// `k,mode,stat,value` rows.
pub fn write_summary(summary: &Summary, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    let csv_err = |e| Error::csv(path, e);
    w.write_record(["k", "mode", "stat", "value"])
        .map_err(csv_err)?;
    for row in summary.rows() {
        w.write_record([
            row.k.to_string(),
            row.mode.to_string(),
            row.stat,
            format_sig9(row.value),
        ])
        .map_err(csv_err)?;
    }
    finish(w, path)
}

/// Truth and estimates sampled on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSet {
    pub xs: Vec<f64>,
    pub truth: Vec<f64>,
    pub columns: Vec<(String, Vec<f64>)>,
}

/// `x,true,<mode>...` with one row per grid point.
pub fn write_curves(curves: &CurveSet, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    let csv_err = |e| Error::csv(path, e);
    let mut header = vec!["x".to_string(), "true".to_string()];
    header.extend(curves.columns.iter().map(|(name, _)| name.clone()));
    w.write_record(&header).map_err(csv_err)?;
    for (i, &x) in curves.xs.iter().enumerate() {
        let mut rec = vec![format_sig9(x), format_sig9(curves.truth[i])];
        rec.extend(curves.columns.iter().map(|(_, v)| format_sig9(v[i])));
        w.write_record(&rec).map_err(csv_err)?;
    }
    finish(w, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::aggregate;
    use proptest::prelude::*;

    #[test]
    fn empty_curves_are_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        let set = CurveSet {
            xs: vec![],
            truth: vec![],
            columns: vec![("junc".into(), vec![])],
        };
        write_curves(&set, &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "x,true,junc\n");
    }

    #[test]
    fn trials_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/trials.csv");
        let rows = vec![
            TrialResult {
                k: 3,
                mode: SweepMode::Junc,
                trial: 0,
                seed: u64::MAX,
                mse: 1.0 / 3.0,
                tv: 0.125,
                wall_time: Duration::from_millis(4),
                error: None,
            },
            TrialResult {
                k: 3,
                mode: SweepMode::Nada,
                trial: 1,
                seed: 7,
                mse: f64::NAN,
                tv: f64::NAN,
                wall_time: Duration::ZERO,
                error: Some("failed, badly".into()),
            },
        ];
        write_trials(&rows, &path).unwrap();
        let back = read_trials(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].seed, u64::MAX);
        assert_eq!(back[0].mse, 3.33333333e-1);
        assert_eq!(back[1].error.as_deref(), Some("failed, badly"));
        assert!(back[1].mse.is_nan());

        let summary_path = dir.path().join("summary.csv");
        write_summary(&aggregate(&back), &summary_path).unwrap();
        let text = std::fs::read_to_string(&summary_path).unwrap();
        assert!(text.starts_with("k,mode,stat,value\n3,junc,mse_count,1.00000000e0\n"));
    }

    #[test]
    fn missing_file_names_the_path() {
        let err = read_trials(Path::new("/nonexistent/trials.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/trials.csv"));
    }

    proptest! {
        #[test]
        fn sig9_round_trip(x in -1e300f64..1e300) {
            let back: f64 = format_sig9(x).parse().unwrap();
            prop_assert!((back - x).abs() <= 5e-9 * x.abs());
            prop_assert_eq!(format_sig9(back), format_sig9(x));
        }
    }
}
