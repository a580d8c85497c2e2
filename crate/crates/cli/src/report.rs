//! Report records and writers: `results.csv`, `summary.json` and
//! `manifest.json`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ong_core::TheoryConstants;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::experiments::FitRecord;
use crate::gates::GateOutcome;
use crate::manifest::RunManifest;

/// One estimated quantity. Parameter fields that do not apply are `None`
/// and are written as empty CSV cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statistic {
    pub experiment: String,
    pub d: usize,
    pub alpha: Option<f64>,
    pub n: Option<usize>,
    pub lambda: Option<f64>,
    pub index: Option<usize>,
    pub label: Option<String>,
    pub statistic: String,
    pub value: f64,
    pub stderr: Option<f64>,
    pub reps: Option<usize>,
    /// Closed-form target, where one exists.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub theory: Option<f64>,
}

impl Statistic {
    pub fn new(experiment: &str, d: usize, statistic: &str, value: f64) -> Self {
        Self {
            experiment: experiment.to_string(),
            d,
            alpha: None,
            n: None,
            lambda: None,
            index: None,
            label: None,
            statistic: statistic.to_string(),
            value,
            stderr: None,
            reps: None,
            theory: None,
        }
    }

    pub fn alpha(mut self, a: f64) -> Self {
        self.alpha = Some(a);
        self
    }

    pub fn n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn lambda(mut self, l: f64) -> Self {
        self.lambda = Some(l);
        self
    }

    pub fn index(mut self, i: usize) -> Self {
        self.index = Some(i);
        self
    }

    pub fn label(mut self, l: impl Into<String>) -> Self {
        self.label = Some(l.into());
        self
    }

    pub fn stderr(mut self, se: Option<f64>) -> Self {
        self.stderr = se;
        self
    }

    pub fn reps(mut self, r: usize) -> Self {
        self.reps = Some(r);
        self
    }

    pub fn theory(mut self, t: Option<f64>) -> Self {
        self.theory = t;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub experiment: String,
    /// All gates passed.
    pub passed: bool,
    pub gates: Vec<GateOutcome>,
    /// Per-point estimates followed by fitted and derived quantities.
    pub statistics: Vec<Statistic>,
    pub fits: Vec<FitRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub constants: Vec<TheoryConstants>,
    pub notes: Vec<String>,
}

pub const CSV_HEADER: [&str; 12] =
    ["experiment", "d", "alpha", "n", "lambda", "index", "label", "statistic", "value", "stderr", "reps", "theory"];

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

/// Long-format CSV, one statistic per row.
pub fn results_csv(rows: &[Statistic]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.experiment.clone(),
            r.d.to_string(),
            opt(&r.alpha),
            opt(&r.n),
            opt(&r.lambda),
            opt(&r.index),
            opt(&r.label),
            r.statistic.clone(),
            r.value.to_string(),
            opt(&r.stderr),
            opt(&r.reps),
            opt(&r.theory),
        ])?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

/// Writes `bytes` to `dir/name` through a temporary file and a rename, so a
/// reader never sees a half-written report.
fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, &target)?;
    Ok(target)
}

/// Writes the three report files into `dir`, creating it if needed.
pub fn write_reports(dir: &Path, rows: &[Statistic], summary: &Summary, manifest: &RunManifest) -> Result<()> {
    fs::create_dir_all(dir)?;
    let csv = results_csv(rows)?;
    let summary = serde_json::to_vec_pretty(summary)?;
    let manifest = serde_json::to_vec_pretty(manifest)?;
    write_atomic(dir, "results.csv", &csv)?;
    write_atomic(dir, "summary.json", &summary)?;
    write_atomic(dir, "manifest.json", &manifest)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let rows = vec![
            Statistic::new("lln", 2, "scaled_mean", 1.0).alpha(1.0).n(100).stderr(Some(0.01)).reps(5).theory(Some(1.0)),
            Statistic::new("mu-limit", 1, "mean_total", 0.25).alpha(2.0).lambda(100.0),
        ];
        let text = String::from_utf8(results_csv(&rows).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "experiment,d,alpha,n,lambda,index,label,statistic,value,stderr,reps,theory");
        assert_eq!(lines[1], "lln,2,1,100,,,,scaled_mean,1,0.01,5,1");
        assert_eq!(lines[2], "mu-limit,1,2,,100,,,mean_total,0.25,,,");
    }

    #[test]
    fn floats_round_trip() {
        let v = 0.1 + 0.2;
        let rows = vec![Statistic::new("lln", 1, "x", v)];
        let text = String::from_utf8(results_csv(&rows).unwrap()).unwrap();
        let cell = text.lines().nth(1).unwrap().split(',').nth(8).unwrap();
        assert_eq!(cell.parse::<f64>().unwrap().to_bits(), v.to_bits());
    }
}
