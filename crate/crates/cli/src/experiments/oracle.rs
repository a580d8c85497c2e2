use ong_core::rng::{labels, sample_points};
use ong_core::{build_ong_with, NnMode};
use rand::Rng;

use super::{ExperimentOutput, RunContext};
use crate::error::Result;

/// Builds each instance three ways: grid, brute force, and grid shadowed by
/// brute force. Every edge must agree exactly.
pub(super) fn oracle_check(ctx: &RunContext<'_>, out: &mut ExperimentOutput) -> Result<()> {
    let d = ctx.cfg.d;
    let max_n = ctx.cfg.oracle_check().max_n;
    let plan = &ctx.plans[0];
    let results = ctx.replicates(plan, |r, s| {
        let n = s.rng().random_range(1..=max_n);
        let seq = sample_points(n, d, &mut s.child(labels::POINTS).rng())?;
        let grid = build_ong_with(&seq, NnMode::Grid)?;
        let brute = build_ong_with(&seq, NnMode::BruteForce)?;
        let shadow_ok = build_ong_with(&seq, NnMode::Shadow).is_ok();
        ctx.dump(plan, r, &grid)?;
        Ok((n, grid.edges() == brute.edges() && shadow_ok))
    })?;
    let failures = results.iter().filter(|r| !r.1).count();
    let points: usize = results.iter().map(|r| r.0).sum();
    out.push(ctx.stat("failures", failures as f64).reps(results.len()));
    out.push(ctx.stat("instances", results.len() as f64));
    out.push(ctx.stat("points", points as f64));
    Ok(())
}
