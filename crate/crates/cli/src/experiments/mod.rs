//! One runner per experiment kind.
//!
//! Replicates of a parameter point run in parallel and are collected in
//! replicate order; every reduction afterwards is sequential, so the output
//! does not depend on the thread count.

mod gain;
mod oracle;
mod resample;
mod tail;
mod totals;
mod voronoi;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ong_core::{loglog_slope, EstimateSummary, NnMode, OngGraph, RandomStream, SlopeFit, TheoryConstants};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::Result;
use crate::plan::PointPlan;
use crate::report::Statistic;

/// A fitted log-log slope as reported in `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub statistic: String,
    pub alpha: Option<f64>,
    pub n: Option<usize>,
    pub label: Option<String>,
    pub theory: Option<f64>,
    pub fit: SlopeFit,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentOutput {
    pub rows: Vec<Statistic>,
    pub fits: Vec<FitRecord>,
    pub constants: Vec<TheoryConstants>,
    pub notes: Vec<String>,
}

impl ExperimentOutput {
    fn push(&mut self, s: Statistic) {
        self.rows.push(s);
    }

    /// Fits `ln y` on `ln x` and records the slope as a statistic. Fits that
    /// cannot be made (too few points, non-positive values) become notes.
    fn fit(&mut self, base: Statistic, points: &[(f64, f64)]) -> Option<f64> {
        match loglog_slope(points, None) {
            Ok(fit) => {
                let slope = fit.slope;
                self.fits.push(FitRecord {
                    statistic: base.statistic.clone(),
                    alpha: base.alpha,
                    n: base.n,
                    label: base.label.clone(),
                    theory: base.theory,
                    fit: fit.clone(),
                });
                self.rows.push(Statistic { value: slope, stderr: Some(fit.slope_stderr), ..base });
                Some(slope)
            }
            Err(e) => {
                self.notes.push(format!("{} not fitted: {e}", base.statistic));
                None
            }
        }
    }
}

/// Shared state of one run.
pub struct RunContext<'a> {
    pub cfg: &'a ExperimentConfig,
    pub plans: &'a [PointPlan],
    pub mode: NnMode,
    pub edges: Option<EdgeSink>,
}

impl RunContext<'_> {
    fn name(&self) -> &'static str {
        self.cfg.experiment.name()
    }

    fn stat(&self, statistic: &str, value: f64) -> Statistic {
        Statistic::new(self.name(), self.cfg.d, statistic, value)
    }

    /// Runs `f` on every replicate of `plan` and returns the results in
    /// replicate order.
    fn replicates<T, F>(&self, plan: &PointPlan, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize, &RandomStream) -> Result<T> + Sync,
    {
        let root = plan.stream(self.cfg.master_seed);
        (0..plan.replicates).into_par_iter().map(|r| f(r, &root.child(r as u64))).collect()
    }

    /// Writes a graph's edges when `--dump-edges` is on.
    fn dump(&self, plan: &PointPlan, replicate: usize, graph: &OngGraph) -> Result<()> {
        match &self.edges {
            Some(sink) => sink.write(&format!("{}-r{replicate}", plan.point.describe()), graph),
            None => Ok(()),
        }
    }
}

/// Summary of per-replicate values, in order.
fn summarize(values: impl IntoIterator<Item = f64>) -> Result<EstimateSummary> {
    let mut s = EstimateSummary::new();
    for v in values {
        s.push(v)?;
    }
    Ok(s)
}

/// Edge-list CSVs, staged in a hidden directory and published on success.
pub struct EdgeSink {
    staging: PathBuf,
    target: PathBuf,
}

impl EdgeSink {
    pub fn new(out_dir: &Path) -> Result<Self> {
        let staging = out_dir.join(".edges.partial");
        if staging.exists() {
            fs::remove_dir_all(&staging)?;
        }
        fs::create_dir_all(&staging)?;
        Ok(Self { staging, target: out_dir.join("edges") })
    }

    fn write(&self, name: &str, graph: &OngGraph) -> Result<()> {
        let file = name.replace([',', ';', '='], "_");
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["source", "target", "squared_length", "length"])?;
        for e in graph.edges() {
            w.write_record([
                e.source.to_string(),
                e.target.to_string(),
                e.squared_length.to_string(),
                e.length().to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        fs::File::create(self.staging.join(format!("{file}.csv")))?.write_all(&bytes)?;
        Ok(())
    }

    pub fn publish(self) -> Result<()> {
        if self.target.exists() {
            fs::remove_dir_all(&self.target)?;
        }
        fs::rename(&self.staging, &self.target)?;
        Ok(())
    }

    pub fn discard(self) {
        let _ = fs::remove_dir_all(&self.staging);
    }
}

pub fn run_experiment(ctx: &RunContext<'_>) -> Result<ExperimentOutput> {
    use ExperimentKind as K;
    let mut out = ExperimentOutput::default();
    match ctx.cfg.experiment {
        K::Lln => totals::lln(ctx, &mut out)?,
        K::LogRegime => totals::log_regime(ctx, &mut out)?,
        K::MuLimit => totals::mu_limit(ctx, &mut out)?,
        K::VarianceScan => totals::variance_scan(ctx, &mut out)?,
        K::MeanGain => gain::mean_gain(ctx, &mut out)?,
        K::CauchyTail => tail::cauchy_tail(ctx, &mut out)?,
        K::ResampleCheck => resample::resample_check(ctx, &mut out)?,
        K::VoronoiScan => voronoi::voronoi_scan(ctx, &mut out)?,
        K::OracleCheck => oracle::oracle_check(ctx, &mut out)?,
        K::Constants => constants(ctx, &mut out)?,
    }
    Ok(out)
}

fn constants(ctx: &RunContext<'_>, out: &mut ExperimentOutput) -> Result<()> {
    let d = ctx.cfg.d;
    out.push(ctx.stat("unit_ball_volume", ong_core::unit_ball_volume(d)?));
    for &a in &ctx.cfg.alphas {
        let c = TheoryConstants::new(d, a)?;
        let mut row = |name: &str, v: Option<f64>| {
            if let Some(v) = v {
                out.rows.push(ctx.stat(name, v).alpha(a));
            }
        };
        row("lln_constant", c.lln_constant);
        row("mu_1d", c.mu_1d);
        row("gain_leading_coefficient", Some(c.gain_leading_coefficient));
        row("variance_exponent", c.variance_exponent());
        out.constants.push(c);
    }
    Ok(())
}
