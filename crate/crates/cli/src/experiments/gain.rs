use ong_core::rng::{labels, sample_points};
use ong_core::theory::gain_leading_coefficient;
use ong_core::{brute_force_nearest, edge_weight};

use super::{summarize, ExperimentOutput, RunContext};
use crate::error::Result;

/// `E[Z_n^alpha]` where `Z_n` is the distance from `U_n` to its nearest
/// predecessor. Only the last query is needed, so it is answered by a
/// direct scan instead of a full build.
pub(super) fn mean_gain(ctx: &RunContext<'_>, out: &mut ExperimentOutput) -> Result<()> {
    let (d, alphas) = (ctx.cfg.d, &ctx.cfg.alphas);
    let df = d as f64;
    let mut curves: Vec<Vec<(f64, f64)>> = vec![Vec::new(); alphas.len()];
    for plan in ctx.plans {
        let n = plan.point.n.expect("mean-gain points carry n");
        let sq = ctx.replicates(plan, |_, s| {
            let seq = sample_points(n, d, &mut s.child(labels::POINTS).rng())?;
            Ok(brute_force_nearest(seq.coords_of(n), &seq.prefix(n - 1))?.squared_distance)
        })?;
        for (k, &a) in alphas.iter().enumerate() {
            let scale = (n as f64).powf(a / df);
            let raw = summarize(sq.iter().map(|&q| edge_weight(q, a)))?;
            let scaled = summarize(sq.iter().map(|&q| scale * edge_weight(q, a)))?;
            out.push(ctx.stat("mean_gain", raw.mean).alpha(a).n(n).stderr(raw.stderr()).reps(plan.replicates));
            out.push(
                ctx.stat("scaled_gain", scaled.mean)
                    .alpha(a)
                    .n(n)
                    .stderr(scaled.stderr())
                    .reps(plan.replicates)
                    .theory(Some(gain_leading_coefficient(d, a)?)),
            );
            curves[k].push((n as f64, raw.mean));
        }
    }
    for (k, &a) in alphas.iter().enumerate() {
        if curves[k].len() >= 3 {
            out.fit(ctx.stat("gain_exponent", 0.0).alpha(a).theory(Some(-a / df)), &curves[k]);
        }
    }
    Ok(())
}
