//! `ong-lab`: configuration-driven Monte Carlo experiments on the on-line
//! nearest-neighbour graph.
//!
//! A run reads one JSON config, executes every replicate on a derived random
//! stream, evaluates the configured tolerance gates and writes
//! `results.csv`, `summary.json` and `manifest.json`.

pub mod config;
pub mod error;
pub mod experiments;
pub mod gates;
pub mod manifest;
pub mod plan;
pub mod report;

use std::path::PathBuf;
use std::time::Instant;

use ong_core::NnMode;

pub use config::{ExperimentConfig, ExperimentKind};
pub use error::{exit, LabError, Result};
pub use manifest::RunManifest;
pub use report::{Statistic, Summary};

use experiments::{run_experiment, EdgeSink, RunContext};

/// Command-line settings that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub shadow_oracle: bool,
    pub dump_edges: bool,
}

impl Overrides {
    pub fn apply(&self, mut cfg: ExperimentConfig) -> Result<ExperimentConfig> {
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        if let Some(seed) = self.seed {
            cfg.master_seed = seed;
        }
        if self.threads.is_some() {
            cfg.threads = self.threads;
        }
        cfg.flags.shadow_oracle |= self.shadow_oracle;
        cfg.flags.dump_edges |= self.dump_edges;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub rows: Vec<Statistic>,
    pub summary: Summary,
    pub manifest: RunManifest,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.summary.passed {
            exit::PASS
        } else {
            exit::GATE_FAILED
        }
    }
}

/// Runs the experiment without writing the report files. Edge dumps, when
/// requested, are still published under `output_dir/edges`.
pub fn execute(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let started = Instant::now();
    let timestamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    let plans = plan::plan_points(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.effective_threads())
        .build()
        .map_err(|e| LabError::Pool(e.to_string()))?;
    let edges = if cfg.flags.dump_edges { Some(EdgeSink::new(&cfg.output_dir)?) } else { None };
    let mut ctx = RunContext {
        cfg,
        plans: &plans,
        mode: if cfg.flags.shadow_oracle { NnMode::Shadow } else { NnMode::Grid },
        edges,
    };
    let result = pool.install(|| run_experiment(&ctx));
    let output = match (result, ctx.edges.take()) {
        (Ok(out), Some(sink)) => {
            sink.publish()?;
            out
        }
        (Ok(out), None) => out,
        (Err(e), sink) => {
            if let Some(sink) = sink {
                sink.discard();
            }
            return Err(e);
        }
    };

    let gates: Vec<_> = cfg.gates.iter().map(|g| g.evaluate(&output.rows)).collect();
    let summary = Summary {
        experiment: cfg.experiment.name().to_string(),
        passed: gates.iter().all(|g| g.passed),
        gates,
        statistics: output.rows.clone(),
        fits: output.fits,
        constants: output.constants,
        notes: output.notes,
    };
    let manifest = RunManifest::new(cfg, &plans, timestamp, started.elapsed().as_secs_f64());
    Ok(RunOutcome { rows: output.rows, summary, manifest })
}

/// Runs the experiment and writes the reports into `cfg.output_dir`. Nothing
/// is written if the run fails.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let outcome = execute(cfg)?;
    report::write_reports(&cfg.output_dir, &outcome.rows, &outcome.summary, &outcome.manifest)?;
    Ok(outcome)
}
