use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::plan::PointPlan;

/// How per-replicate streams are derived, recorded with every run.
pub const STREAM_RULE: &str = "replicate r of a point runs on RandomStream::from_path(master_seed, path ++ [r]); \
state(root) = mix64(master_seed), state(child) = mix64(state(parent) ^ mix64(label ^ 0x6A09E667F3BCC909)), \
generator = ChaCha8Rng::seed_from_u64(state)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedPaths {
    pub point: String,
    pub path: Vec<u64>,
    pub replicates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub library_version: String,
    pub runner_version: String,
    /// Start of the run, RFC 3339 UTC.
    pub timestamp: String,
    pub wall_clock_seconds: f64,
    pub host_threads: usize,
    pub threads: usize,
    pub master_seed: u64,
    pub stream_rule: String,
    pub seed_paths: Vec<SeedPaths>,
}

impl RunManifest {
    pub fn new(cfg: &ExperimentConfig, plans: &[PointPlan], timestamp: String, wall_clock_seconds: f64) -> Self {
        Self {
            config: cfg.clone(),
            library_version: ong_core::VERSION.to_string(),
            runner_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp,
            wall_clock_seconds,
            host_threads: crate::config::host_threads(),
            threads: cfg.effective_threads(),
            master_seed: cfg.master_seed,
            stream_rule: STREAM_RULE.to_string(),
            seed_paths: plans
                .iter()
                .map(|p| SeedPaths { point: p.point.describe(), path: p.path.clone(), replicates: p.replicates })
                .collect(),
        }
    }
}
