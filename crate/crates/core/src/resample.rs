//! Re-sampling diagnostics: the six-component split of the change in total
//! weight when one point is re-drawn, nested Monte Carlo estimates of the
//! squared conditional mean of that change, and second moments of tail
//! increments on coupled prefixes.
//!
//! For a sequence `U = (U_1..U_n)`, index `i` and replacement `U_i'`, write
//! `U^i` for the sequence with `U_i` replaced and `U_{-i}` for the sequence
//! with `U_i` deleted. With weights taken in the respective graphs,
//!
//! ```text
//! D1, D2  edge leaving U_i in ONG(U), U_i' in ONG(U^i)
//! D3, D4  edges from later points into U_i in ONG(U), into U_i' in ONG(U^i)
//! D5, D6  in ONG(U_{-i}), edges leaving the later points that attach to
//!         U_i' in ONG(U^i), respectively to U_i in ONG(U)
//! ```
//!
//! and `O(U^i) - O(U) = D2 + D4 + D6 - D1 - D3 - D5` holds pathwise.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, OngError, Result};
use crate::geometry::{Point, PointSequence};
use crate::nn_index::NnMode;
use crate::ong::{build_ong_with, check_alpha, totals_at, OngBuilder, OngGraph};
use crate::rng::{labels, push_uniform_point, sample_points, RandomStream};
use crate::stats::{CompensatedSum, EstimateSummary};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResampleBreakdown {
    pub i: usize,
    /// `delta[l - 1]` is component `l`.
    pub delta: [f64; 6],
    /// `O(U^i) - O(U)` from two independent full builds.
    pub total: f64,
}

impl ResampleBreakdown {
    /// `D2 + D4 + D6 - D1 - D3 - D5`.
    pub fn recombined(&self) -> f64 {
        let d = &self.delta;
        (d[1] + d[3] + d[5]) - (d[0] + d[2] + d[4])
    }

    /// Largest of `|total|` and the six components.
    pub fn scale(&self) -> f64 {
        self.delta.iter().fold(self.total.abs(), |m, &x| m.max(x.abs()))
    }

    /// Whether the identity holds to `rel` times [`Self::scale`].
    pub fn identity_holds(&self, rel: f64) -> bool {
        (self.total - self.recombined()).abs() <= rel * self.scale()
    }
}

fn outgoing(g: &OngGraph, source: usize, alpha: f64) -> f64 {
    g.edge_from(source).map_or(0.0, |e| e.weight(alpha))
}

fn incoming_sources(g: &OngGraph, target: usize) -> Vec<usize> {
    g.edges().iter().filter(|e| e.target == target).map(|e| e.source).collect()
}

fn weight_of(g: &OngGraph, sources: &[usize], alpha: f64) -> f64 {
    sources.iter().map(|&s| outgoing(g, s, alpha)).collect::<CompensatedSum>().value()
}

/// The six components by edge-list scans of three full builds, plus the
/// total from two of them.
pub fn resample_breakdown(seq: &PointSequence, i: usize, x_new: &Point, alpha: f64) -> Result<ResampleBreakdown> {
    resample_breakdown_with(seq, i, x_new, alpha, NnMode::Grid)
}

pub fn resample_breakdown_with(
    seq: &PointSequence,
    i: usize,
    x_new: &Point,
    alpha: f64,
    mode: NnMode,
) -> Result<ResampleBreakdown> {
    check_alpha(alpha)?;
    check_dim(seq.dim(), x_new.dim())?;
    let resampled = seq.with_replaced(i, x_new)?;
    let removed = seq.without(i)?;
    let g = build_ong_with(seq, mode)?;
    let gi = build_ong_with(&resampled, mode)?;
    let gm = build_ong_with(&removed, mode)?;

    let into_old = incoming_sources(&g, i);
    let into_new = incoming_sources(&gi, i);
    // Point j > i has arrival index j - 1 once i is deleted.
    let shifted = |v: &[usize]| v.iter().map(|&j| j - 1).collect::<Vec<_>>();

    let delta = [
        outgoing(&g, i, alpha),
        outgoing(&gi, i, alpha),
        weight_of(&g, &into_old, alpha),
        weight_of(&gi, &into_new, alpha),
        weight_of(&gm, &shifted(&into_new), alpha),
        weight_of(&gm, &shifted(&into_old), alpha),
    ];
    let total = gi.total_weight(alpha)? - g.total_weight(alpha)?;
    Ok(ResampleBreakdown { i, delta, total })
}

/// `O(U^i) - O(U)` alone. Edges leaving points before `i` coincide in both
/// graphs, so the shared prefix is indexed once and only the suffix weights
/// are summed.
pub fn resample_delta(seq: &PointSequence, i: usize, x_new: &Point, alpha: f64, mode: NnMode) -> Result<f64> {
    check_alpha(alpha)?;
    check_dim(seq.dim(), x_new.dim())?;
    if i == 0 || i > seq.len() {
        return Err(OngError::InvalidArgument(format!("index {i} outside 1..={}", seq.len())));
    }
    let mut prefix = OngBuilder::new(seq.dim(), mode);
    for p in seq.iter().take(i - 1) {
        prefix.push(p)?;
    }
    let mut original = prefix.clone();
    let mut replaced = prefix;
    let mut acc = CompensatedSum::new();
    if let Some(e) = replaced.push(x_new.coords())? {
        acc.add(e.weight(alpha));
    }
    if let Some(e) = original.push(seq.coords_of(i))? {
        acc.add(-e.weight(alpha));
    }
    for p in seq.iter().skip(i) {
        let a = replaced.push(p)?.map_or(0.0, |e| e.weight(alpha));
        let b = original.push(p)?.map_or(0.0, |e| e.weight(alpha));
        if a != b {
            acc.add(a);
            acc.add(-b);
        }
    }
    Ok(acc.value())
}

/// Which quantity a conditioned second moment refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaTarget {
    Total,
    /// Component `l` in `1..=6`.
    Component(u8),
}

/// Estimate of `E[(E[X | F_i])^2]` for `X` the total change or one component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionedSecondMoment {
    pub i: usize,
    pub n: usize,
    pub alpha: f64,
    pub target: DeltaTarget,
    /// Outer mean of the product of the two inner half-averages; unbiased.
    pub value: f64,
    pub stderr: f64,
    /// Outer mean of the squared full inner average; biased upward by the
    /// inner variance over `inner_reps`.
    pub naive: f64,
    pub outer_reps: usize,
    pub inner_reps: usize,
}

/// Description of the debiasing recorded with every estimate.
pub const SPLIT_HALF_NOTE: &str = "inner re-draws are split into two halves; the product of the half means \
is unbiased for the squared conditional mean given the first i points";

/// Nested Monte Carlo for the squared conditional mean of the total change
/// given `F_i`, the first `i` points.
///
/// Outer replicate `r` draws `U_1..U_i` from `stream.child(r).child(POINTS)`.
/// Inner replicate `k` draws `U_i'` and then `U_{i+1}..U_n` from
/// `stream.child(r).child(RESAMPLE).child(k)`.
pub fn estimate_conditioned_second_moment(
    n: usize,
    i: usize,
    d: usize,
    alpha: f64,
    outer_reps: usize,
    inner_reps: usize,
    stream: &RandomStream,
) -> Result<ConditionedSecondMoment> {
    let mut all = nested(n, i, d, alpha, outer_reps, inner_reps, stream, false)?;
    Ok(all.swap_remove(0))
}

/// As [`estimate_conditioned_second_moment`], for the total followed by the
/// six components. Uses the full three-build breakdown per inner draw.
pub fn estimate_conditioned_second_moments(
    n: usize,
    i: usize,
    d: usize,
    alpha: f64,
    outer_reps: usize,
    inner_reps: usize,
    stream: &RandomStream,
) -> Result<Vec<ConditionedSecondMoment>> {
    nested(n, i, d, alpha, outer_reps, inner_reps, stream, true)
}

#[allow(clippy::too_many_arguments)]
fn nested(
    n: usize,
    i: usize,
    d: usize,
    alpha: f64,
    outer_reps: usize,
    inner_reps: usize,
    stream: &RandomStream,
    components: bool,
) -> Result<Vec<ConditionedSecondMoment>> {
    check_alpha(alpha)?;
    if d == 0 {
        return Err(OngError::InvalidArgument("dimension must be at least 1".into()));
    }
    if i == 0 || i > n {
        return Err(OngError::InvalidArgument(format!("index {i} outside 1..={n}")));
    }
    if outer_reps < 2 || inner_reps < 2 {
        return Err(OngError::InvalidArgument("outer and inner replicate counts must be at least 2".into()));
    }
    let width = if components { 7 } else { 1 };
    let half = inner_reps / 2;

    // Per outer replicate: (product of half means, squared full mean) per target.
    let per_outer: Vec<Vec<(f64, f64)>> = (0..outer_reps as u64)
        .into_par_iter()
        .map(|r| -> Result<Vec<(f64, f64)>> {
            let outer = stream.child(r);
            let fixed = sample_points(i, d, &mut outer.child(labels::POINTS).rng())?;
            let inner_root = outer.child(labels::RESAMPLE);
            let mut sums_a = vec![0.0; width];
            let mut sums_b = vec![0.0; width];
            let mut buf = Vec::with_capacity(n * d);
            for k in 0..inner_reps {
                let mut rng = inner_root.child(k as u64).rng();
                buf.clear();
                buf.extend_from_slice(fixed.flat());
                let mut x_new = Vec::with_capacity(d);
                push_uniform_point(&mut x_new, d, &mut rng);
                for _ in i..n {
                    push_uniform_point(&mut buf, d, &mut rng);
                }
                let seq = PointSequence::from_flat_unchecked(d, buf.clone());
                let x_new = Point::new(x_new)?;
                let sums = if k < half { &mut sums_a } else { &mut sums_b };
                if components {
                    let b = resample_breakdown(&seq, i, &x_new, alpha)?;
                    sums[0] += b.total;
                    for l in 0..6 {
                        sums[l + 1] += b.delta[l];
                    }
                } else {
                    sums[0] += resample_delta(&seq, i, &x_new, alpha, NnMode::Grid)?;
                }
            }
            let nb = (inner_reps - half) as f64;
            Ok((0..width)
                .map(|t| {
                    let ma = sums_a[t] / half as f64;
                    let mb = sums_b[t] / nb;
                    let full = (sums_a[t] + sums_b[t]) / inner_reps as f64;
                    (ma * mb, full * full)
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    (0..width)
        .map(|t| {
            let mut prod = EstimateSummary::new();
            let mut naive = EstimateSummary::new();
            for row in &per_outer {
                prod.push(row[t].0)?;
                naive.push(row[t].1)?;
            }
            Ok(ConditionedSecondMoment {
                i,
                n,
                alpha,
                target: if t == 0 { DeltaTarget::Total } else { DeltaTarget::Component(t as u8) },
                value: prod.mean,
                stderr: prod.stderr().unwrap_or(0.0),
                naive: naive.mean,
                outer_reps,
                inner_reps,
            })
        })
        .collect()
}

/// Centred second moment of `O(U_n) - O(U_m)` on coupled prefixes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailIncrement {
    pub m: usize,
    pub n: usize,
    pub alpha: f64,
    /// Sample variance of the increment.
    pub second_moment: f64,
    /// Standard error of the sample variance.
    pub stderr: f64,
    pub mean_increment: f64,
    pub reps: usize,
}

/// Replicate `r` draws `U_1..U_n` from `stream.child(r).child(POINTS)` and
/// takes both totals from one build.
pub fn tail_increment_l2(m: usize, n: usize, d: usize, alpha: f64, reps: usize, stream: &RandomStream) -> Result<TailIncrement> {
    check_alpha(alpha)?;
    if m == 0 || m >= n {
        return Err(OngError::InvalidArgument(format!("need 1 <= m < n, got m = {m}, n = {n}")));
    }
    if reps < 2 {
        return Err(OngError::InvalidArgument("at least 2 replicates are required".into()));
    }
    let increments: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|r| -> Result<f64> {
            let seq = sample_points(n, d, &mut stream.child(r).child(labels::POINTS).rng())?;
            let t = totals_at(&seq, alpha, &[m, n], NnMode::Grid)?;
            Ok(t[1] - t[0])
        })
        .collect::<Result<_>>()?;
    let s = EstimateSummary::from_samples(&increments)?;
    Ok(TailIncrement {
        m,
        n,
        alpha,
        second_moment: s.variance().expect("reps >= 2"),
        stderr: s.variance_stderr().unwrap_or(f64::NAN),
        mean_increment: s.mean,
        reps,
    })
}
