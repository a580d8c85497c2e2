//! Deterministic job enumeration.
//!
//! Every replicate of every parameter point runs on the stream
//! `RandomStream::from_path(master_seed, [experiment id, point key, replicate])`.
//! The point key is derived from the parameter values themselves, so
//! reordering the lists in a config reorders the jobs but leaves every
//! job's seed unchanged.

use ong_core::rng::{derive_state, RandomStream};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, ExperimentKind};

/// One parameter point of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint {
    pub d: usize,
    pub n: Option<usize>,
    pub lambda: Option<f64>,
    /// Re-sampled index of resample-check.
    pub index: Option<usize>,
    /// Cell centre of voronoi-scan.
    pub x: Option<Vec<f64>>,
    /// Exponents measured on this point's replicates.
    pub alphas: Vec<f64>,
}

impl ParamPoint {
    fn new(d: usize, alphas: &[f64]) -> Self {
        Self { d, n: None, lambda: None, index: None, x: None, alphas: alphas.to_vec() }
    }

    /// Key derived from the values that determine the random input. The
    /// exponents are excluded: one sample serves every exponent.
    pub fn key(&self) -> u64 {
        let mut k = derive_state(0x006F_6E67_2D6C_6162, self.d as u64);
        if let Some(n) = self.n {
            k = derive_state(derive_state(k, 1), n as u64);
        }
        if let Some(l) = self.lambda {
            k = derive_state(derive_state(k, 2), l.to_bits());
        }
        if let Some(i) = self.index {
            k = derive_state(derive_state(k, 3), i as u64);
        }
        if let Some(x) = &self.x {
            k = derive_state(k, 4);
            for c in x {
                k = derive_state(k, c.to_bits());
            }
        }
        k
    }

    pub fn describe(&self) -> String {
        let mut parts = vec![format!("d={}", self.d)];
        if let Some(n) = self.n {
            parts.push(format!("n={n}"));
        }
        if let Some(l) = self.lambda {
            parts.push(format!("lambda={l}"));
        }
        if let Some(i) = self.index {
            parts.push(format!("i={i}"));
        }
        if let Some(x) = &self.x {
            parts.push(format!("x={}", format_point(x)));
        }
        parts.join(",")
    }
}

pub fn format_point(x: &[f64]) -> String {
    x.iter().map(f64::to_string).collect::<Vec<_>>().join(";")
}

/// A parameter point with its replicate count and seed path prefix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointPlan {
    pub point: ParamPoint,
    /// `[experiment id, point key]`; replicate `r` appends `r`.
    pub path: Vec<u64>,
    pub replicates: usize,
}

impl PointPlan {
    /// Stream of the point; replicate `r` uses `.child(r)`.
    pub fn stream(&self, master_seed: u64) -> RandomStream {
        RandomStream::from_path(master_seed, &self.path)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Job {
    pub point: usize,
    pub replicate: usize,
    pub path: Vec<u64>,
}

/// Parameter points of an experiment in config order.
pub fn plan_points(cfg: &ExperimentConfig) -> Vec<PointPlan> {
    use ExperimentKind as K;
    let d = cfg.d;
    let mut points = Vec::new();
    match cfg.experiment {
        K::Constants => {}
        // One nested sequence per replicate serves every n: its prefixes are
        // the smaller samples, so the key does not depend on the n list.
        K::OracleCheck | K::VarianceScan => points.push(ParamPoint::new(d, &cfg.alphas)),
        K::MuLimit => {
            for &n in &cfg.ns {
                points.push(ParamPoint { n: Some(n), ..ParamPoint::new(d, &cfg.alphas) });
            }
            for &l in &cfg.lambdas {
                points.push(ParamPoint { lambda: Some(l), ..ParamPoint::new(d, &cfg.alphas) });
            }
        }
        K::ResampleCheck => {
            for &n in &cfg.ns {
                for &i in cfg.resample_check().indices.iter().filter(|&&i| i <= n) {
                    points.push(ParamPoint { n: Some(n), index: Some(i), ..ParamPoint::new(d, &cfg.alphas) });
                }
            }
        }
        K::VoronoiScan => {
            for x in &cfg.voronoi_scan().points {
                for &n in &cfg.ns {
                    points.push(ParamPoint { n: Some(n), x: Some(x.clone()), ..ParamPoint::new(d, &cfg.alphas) });
                }
            }
        }
        _ => {
            for &n in &cfg.ns {
                points.push(ParamPoint { n: Some(n), ..ParamPoint::new(d, &cfg.alphas) });
            }
        }
    }
    let id = cfg.experiment.stream_id();
    points
        .into_iter()
        .map(|point| {
            let path = vec![id, point.key()];
            PointPlan { point, path, replicates: cfg.replicates }
        })
        .collect()
}

/// Every `(parameter point, replicate, seed path)` of the experiment.
pub fn plan_grid(cfg: &ExperimentConfig) -> Vec<Job> {
    plan_points(cfg)
        .iter()
        .enumerate()
        .flat_map(|(p, plan)| {
            (0..plan.replicates).map(move |r| {
                let mut path = plan.path.clone();
                path.push(r as u64);
                Job { point: p, replicate: r, path }
            })
        })
        .collect()
}
