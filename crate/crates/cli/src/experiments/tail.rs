use ong_core::tail_increment_l2;

use super::{ExperimentOutput, RunContext};
use crate::error::Result;

/// `E[(O(U_n) - O(U_m) - mean)^2]` at `n = ratio * m` for each `m`.
pub(super) fn cauchy_tail(ctx: &RunContext<'_>, out: &mut ExperimentOutput) -> Result<()> {
    let (d, alphas) = (ctx.cfg.d, &ctx.cfg.alphas);
    let ratio = ctx.cfg.cauchy_tail().ratio;
    for &a in alphas {
        let mut points = Vec::new();
        for plan in ctx.plans {
            let m = plan.point.n.expect("cauchy-tail points carry m");
            let t = tail_increment_l2(m, ratio * m, d, a, plan.replicates, &plan.stream(ctx.cfg.master_seed))?;
            out.push(
                ctx.stat("tail_second_moment", t.second_moment)
                    .alpha(a)
                    .n(m)
                    .stderr(Some(t.stderr))
                    .reps(t.reps),
            );
            out.push(ctx.stat("mean_increment", t.mean_increment).alpha(a).n(m).reps(t.reps));
            points.push((m as f64, t.second_moment));
        }
        points.sort_by(|x, y| x.0.total_cmp(&y.0));
        let monotone = points.windows(2).all(|w| w[1].1 < w[0].1);
        out.push(ctx.stat("tail_monotone", if monotone { 1.0 } else { 0.0 }).alpha(a));
        out.fit(ctx.stat("tail_slope", 0.0).alpha(a), &points);
    }
    out.notes.push(format!("each m is paired with n = {ratio} m on one nested sample"));
    Ok(())
}
