//! Experiments on the total weight `O(U_n)`.

use ong_core::rng::{labels, sample_points};
use ong_core::{build_ong_with, lln_constant, mu_1d, poissonized_total, totals_at_many, unit_ball_volume, PointSequence};
use ong_core::{predicted_regimes, RandomStream, TheoryConstants};

use super::{summarize, ExperimentOutput, RunContext};
use crate::error::Result;
use crate::plan::PointPlan;

fn sample(ctx: &RunContext<'_>, n: usize, stream: &RandomStream) -> Result<PointSequence> {
    Ok(sample_points(n, ctx.cfg.d, &mut stream.child(labels::POINTS).rng())?)
}

/// Totals `[alpha][checkpoint]` from one build, dumping the edges if asked.
fn totals(
    ctx: &RunContext<'_>,
    plan: &PointPlan,
    r: usize,
    seq: &PointSequence,
    checkpoints: &[usize],
) -> Result<Vec<Vec<f64>>> {
    if ctx.edges.is_some() {
        ctx.dump(plan, r, &build_ong_with(seq, ctx.mode)?)?;
    }
    Ok(totals_at_many(seq, &ctx.cfg.alphas, checkpoints, ctx.mode)?)
}

pub(super) fn lln(ctx: &RunContext<'_>, out: &mut ExperimentOutput) -> Result<()> {
    let (d, alphas) = (ctx.cfg.d, &ctx.cfg.alphas);
    let df = d as f64;
    let mut means: Vec<Vec<(f64, f64)>> = vec![Vec::new(); alphas.len()];
    for plan in ctx.plans {
        let n = plan.point.n.expect("lln points carry n");
        let reps = ctx.replicates(plan, |r, s| totals(ctx, plan, r, &sample(ctx, n, s)?, &[n]))?;
        for (k, &a) in alphas.iter().enumerate() {
            let scale = (n as f64).powf((a - df) / df);
            let raw = summarize(reps.iter().map(|t| t[k][0]))?;
            let scaled = summarize(reps.iter().map(|t| scale * t[k][0]))?;
            out.push(ctx.stat("mean_total", raw.mean).alpha(a).n(n).stderr(raw.stderr()).reps(plan.replicates));
            out.push(
                ctx.stat("scaled_mean", scaled.mean)
                    .alpha(a)
                    .n(n)
                    .stderr(scaled.stderr())
                    .reps(plan.replicates)
                    .theory(Some(lln_constant(d, a)?)),
            );
            means[k].push((n as f64, raw.mean));
        }
    }
    for (k, &a) in alphas.iter().enumerate() {
        if means[k].len() >= 3 {
            out.fit(ctx.stat("mean_exponent", 0.0).alpha(a).theory(Some(1.0 - a / df)), &means[k]);
        }
    }
    Ok(())
}

pub(super) fn log_regime(ctx: &RunContext<'_>, out: &mut ExperimentOutput) -> Result<()> {
    let target = std::f64::consts::LN_2 / unit_ball_volume(ctx.cfg.d)?;
    for plan in ctx.plans {
        let n = plan.point.n.expect("log-regime points carry n");
        let reps = ctx.replicates(plan, |r, s| totals(ctx, plan, r, &sample(ctx, 2 * n, s)?, &[n, 2 * n]))?;
        for (k, &a) in ctx.cfg.alphas.iter().enumerate() {
            let diff = summarize(reps.iter().map(|t| t[k][1] - t[k][0]))?;
            let base = summarize(reps.iter().map(|t| t[k][0]))?;
            out.push(ctx.stat("mean_total", base.mean).alpha(a).n(n).stderr(base.stderr()).reps(plan.replicates));
            out.push(
                ctx.stat("dyadic_difference", diff.mean)
                    .alpha(a)
                    .n(n)
                    .stderr(diff.stderr())
                    .reps(plan.replicates)
                    .theory(Some(target)),
            );
        }
    }
    out.notes.push("dyadic_difference at n is E[O(U_2n)] - E[O(U_n)] on nested samples".into());
    Ok(())
}

pub(super) fn mu_limit(ctx: &RunContext<'_>, out: &mut ExperimentOutput) -> Result<()> {
    let (d, alphas) = (ctx.cfg.d, &ctx.cfg.alphas);
    let limit = |a: f64| if d == 1 { mu_1d(a).ok() } else { None };
    // (alpha, n, mean, stderr) of the binomial runs, for the CI comparison.
    let mut binomial = Vec::new();
    for plan in ctx.plans {
        if let Some(n) = plan.point.n {
            let reps = ctx.replicates(plan, |r, s| totals(ctx, plan, r, &sample(ctx, n, s)?, &[n]))?;
            for (k, &a) in alphas.iter().enumerate() {
                let s = summarize(reps.iter().map(|t| t[k][0]))?;
                out.push(
                    ctx.stat("mean_total", s.mean)
                        .alpha(a)
                        .n(n)
                        .stderr(s.stderr())
                        .reps(plan.replicates)
                        .theory(limit(a)),
                );
                binomial.push((a, n, s.mean, s.stderr().unwrap_or(f64::NAN)));
            }
        }
    }
    for plan in ctx.plans {
        let Some(lambda) = plan.point.lambda else { continue };
        for &a in alphas {
            let reps = ctx.replicates(plan, |_, s| Ok(poissonized_total(lambda, d, a, s, ctx.mode)?))?;
            let s = summarize(reps.iter().map(|p| p.total))?;
            let count = summarize(reps.iter().map(|p| p.count as f64))?;
            out.push(
                ctx.stat("poisson_mean_total", s.mean)
                    .alpha(a)
                    .lambda(lambda)
                    .stderr(s.stderr())
                    .reps(plan.replicates)
                    .theory(limit(a)),
            );
            out.push(ctx.stat("mean_count", count.mean).alpha(a).lambda(lambda).stderr(count.stderr()).reps(plan.replicates));
            let se = s.stderr().unwrap_or(f64::NAN);
            for &(ba, n, mean, bse) in &binomial {
                if ba == a && n as f64 == lambda {
                    // Two 95% intervals overlap iff this is non-negative.
                    let margin = 1.96 * (se + bse) - (s.mean - mean).abs();
                    out.push(ctx.stat("ci_overlap_margin", margin).alpha(a).n(n).lambda(lambda));
                }
            }
        }
    }
    Ok(())
}

pub(super) fn variance_scan(ctx: &RunContext<'_>, out: &mut ExperimentOutput) -> Result<()> {
    let (d, alphas, ns) = (ctx.cfg.d, &ctx.cfg.alphas, &ctx.cfg.ns);
    let plan = &ctx.plans[0];
    let max_n = *ns.iter().max().expect("validated");
    let reps = ctx.replicates(plan, |r, s| totals(ctx, plan, r, &sample(ctx, max_n, s)?, ns))?;
    for (k, &a) in alphas.iter().enumerate() {
        let mut points = Vec::new();
        let mut ratios = Vec::new();
        for (j, &n) in ns.iter().enumerate() {
            let s = summarize(reps.iter().map(|t| t[k][j]))?;
            let var = s.variance().expect("at least 2 replicates");
            let vse = s.variance_stderr();
            out.push(ctx.stat("mean_total", s.mean).alpha(a).n(n).stderr(s.stderr()).reps(plan.replicates));
            out.push(ctx.stat("variance", var).alpha(a).n(n).stderr(vse).reps(plan.replicates));
            if n >= 2 {
                let ln = (n as f64).ln();
                out.push(ctx.stat("var_over_log_n", var / ln).alpha(a).n(n).stderr(vse.map(|v| v / ln)));
                ratios.push(var / ln);
            }
            if let Some(se) = vse.filter(|se| var > 0.0 && *se > 0.05 * var) {
                out.notes.push(format!(
                    "alpha={a}, n={n}: relative stderr of the variance is {:.3}, above 0.05",
                    se / var
                ));
            }
            points.push((n as f64, var));
        }
        let exponent = TheoryConstants::new(d, a)?.variance_exponent();
        out.fit(ctx.stat("variance_slope", 0.0).alpha(a).theory(exponent), &points);
        if ratios.len() >= 2 {
            let max = ratios.iter().copied().fold(f64::MIN, f64::max);
            let min = ratios.iter().copied().fold(f64::MAX, f64::min);
            out.push(ctx.stat("variance_log_ratio_spread", max / min).alpha(a));
        }
        let regimes = predicted_regimes(d, a)?;
        out.notes.push(format!("alpha={a}: predicted variance regime {:?}", regimes.variance));
    }
    out.notes.push("every n is a prefix of one nested sample per replicate".into());
    Ok(())
}
