use ong_core::resample::SPLIT_HALF_NOTE;
use ong_core::{estimate_conditioned_second_moment, estimate_conditioned_second_moments, DeltaTarget};

use super::{ExperimentOutput, RunContext};
use crate::error::Result;
use crate::report::Statistic;

pub(super) fn resample_check(ctx: &RunContext<'_>, out: &mut ExperimentOutput) -> Result<()> {
    let (d, alphas) = (ctx.cfg.d, &ctx.cfg.alphas);
    let p = ctx.cfg.resample_check();
    let df = d as f64;
    for &a in alphas {
        let mut curves: Vec<(usize, Vec<(f64, f64)>)> = Vec::new();
        for plan in ctx.plans {
            let n = plan.point.n.expect("resample points carry n");
            let i = plan.point.index.expect("resample points carry i");
            let stream = plan.stream(ctx.cfg.master_seed);
            let estimates = if p.components {
                estimate_conditioned_second_moments(n, i, d, a, plan.replicates, p.inner_reps, &stream)?
            } else {
                vec![estimate_conditioned_second_moment(n, i, d, a, plan.replicates, p.inner_reps, &stream)?]
            };
            for e in &estimates {
                let label = match e.target {
                    DeltaTarget::Total => "total".to_string(),
                    DeltaTarget::Component(l) => l.to_string(),
                };
                let base = ctx.stat("conditioned_second_moment", e.value).alpha(a).n(n).index(i).label(&label);
                out.push(base.clone().stderr(Some(e.stderr)).reps(e.outer_reps));
                out.push(Statistic { statistic: "naive_second_moment".into(), value: e.naive, ..base });
                if e.target == DeltaTarget::Total {
                    match curves.iter_mut().find(|c| c.0 == n) {
                        Some(c) => c.1.push((i as f64, e.value)),
                        None => curves.push((n, vec![(i as f64, e.value)])),
                    }
                }
            }
        }
        for (n, points) in curves {
            if points.len() >= 3 {
                out.fit(
                    ctx.stat("conditioned_decay_slope", 0.0).alpha(a).n(n).label("total").theory(Some(-2.0 * a / df)),
                    &points,
                );
            }
        }
    }
    out.notes.push(SPLIT_HALF_NOTE.to_string());
    Ok(())
}
