use ong_core::rng::{labels, sample_points};
use ong_core::{cone_radius_1d, voronoi_diameter, Point};

use super::{summarize, ExperimentOutput, RunContext};
use crate::error::Result;
use crate::plan::format_point;

/// Stream label of the ray directions.
const RAYS: u64 = 0x5241_5953;

/// Slack on `diam <= 2 R` for rounding in the midpoint arithmetic.
const BOUND_SLACK: f64 = 1e-12;

pub(super) fn voronoi_scan(ctx: &RunContext<'_>, out: &mut ExperimentOutput) -> Result<()> {
    let d = ctx.cfg.d;
    let rays = ctx.cfg.voronoi_scan().rays;
    let mut violations = 0usize;
    let mut checked = 0usize;
    let mut curves: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for plan in ctx.plans {
        let n = plan.point.n.expect("voronoi points carry n");
        let x = Point::new(plan.point.x.clone().expect("voronoi points carry x"))?;
        let label = format_point(x.coords());
        // (diameter, cone radius) per replicate.
        let reps = ctx.replicates(plan, |_, s| {
            let prefix = sample_points(n, d, &mut s.child(labels::POINTS).rng())?;
            let diam = voronoi_diameter(&x, &prefix, rays, &mut s.child(RAYS).rng())?.value;
            let radius = if d == 1 { Some(cone_radius_1d(&x, &prefix)?.value) } else { None };
            Ok((diam, radius))
        })?;
        let s = summarize(reps.iter().map(|r| r.0))?;
        out.push(
            ctx.stat("mean_diameter", s.mean).n(n).label(&label).stderr(s.stderr()).reps(plan.replicates),
        );
        if d == 1 {
            let radius = summarize(reps.iter().filter_map(|r| r.1))?;
            out.push(
                ctx.stat("mean_cone_radius", radius.mean)
                    .n(n)
                    .label(&label)
                    .stderr(radius.stderr())
                    .reps(plan.replicates),
            );
            for &(diam, r) in &reps {
                let r = r.expect("d = 1");
                checked += 1;
                if diam > 2.0 * r * (1.0 + BOUND_SLACK) {
                    violations += 1;
                }
            }
        }
        match curves.iter_mut().find(|c| c.0 == label) {
            Some(c) => c.1.push((n as f64, s.mean)),
            None => curves.push((label, vec![(n as f64, s.mean)])),
        }
    }
    for (label, points) in curves {
        if points.len() >= 3 {
            out.fit(ctx.stat("diameter_slope", 0.0).label(label).theory(Some(-1.0 / d as f64)), &points);
        }
    }
    if d == 1 {
        out.push(ctx.stat("bound_violations", violations as f64).reps(checked));
        out.notes.push("d = 1: exact diameters; the bound diam <= 2R is checked on every instance".into());
    } else {
        out.notes.push(format!("d = {d}: ray-cast lower bound on the diameter with {rays} rays"));
    }
    Ok(())
}
