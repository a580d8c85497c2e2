//! The on-line nearest-neighbour graph and its functionals.
//!
//! Each point after the first is joined by a directed edge to its nearest
//! predecessor. Edges store squared lengths; the weight `length^alpha` is
//! applied at aggregation time as `squared_length^(alpha/2)`, so one graph
//! serves every exponent.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, OngError, Result};
use crate::geometry::{Point, PointSequence};
use crate::nn_index::{AnyIndex, NearestIndex, NnAnswer, NnMode};
use crate::rng::{labels, sample_points, sample_poisson_count, RandomStream};
use crate::stats::CompensatedSum;

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(OngError::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    Ok(())
}

/// `squared_length^(alpha/2)`, with the common exponents special-cased.
#[inline]
pub fn edge_weight(squared_length: f64, alpha: f64) -> f64 {
    if squared_length == 0.0 {
        0.0
    } else if alpha == 2.0 {
        squared_length
    } else if alpha == 1.0 {
        squared_length.sqrt()
    } else if alpha == 0.5 {
        squared_length.sqrt().sqrt()
    } else {
        squared_length.powf(0.5 * alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OngEdge {
    /// Arrival index of the later point.
    pub source: usize,
    /// Arrival index of its nearest predecessor.
    pub target: usize,
    pub squared_length: f64,
}

impl OngEdge {
    pub fn length(&self) -> f64 {
        self.squared_length.sqrt()
    }

    pub fn weight(&self, alpha: f64) -> f64 {
        edge_weight(self.squared_length, alpha)
    }
}

/// Incremental ONG construction: feed points in arrival order and receive
/// each point's nearest-predecessor answer.
#[derive(Debug, Clone)]
pub struct OngBuilder {
    index: AnyIndex,
}

impl OngBuilder {
    pub fn new(dim: usize, mode: NnMode) -> Self {
        Self { index: mode.index(dim, 1) }
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Inserts the next point; returns its edge, `None` for the first point.
    pub fn push(&mut self, p: &[f64]) -> Result<Option<OngEdge>> {
        let source = self.index.len() + 1;
        let edge = if source == 1 {
            check_dim(self.index.dim(), p.len())?;
            None
        } else {
            let NnAnswer { index, squared_distance } = self.index.nearest(p)?;
            Some(OngEdge { source, target: index, squared_length: squared_distance })
        };
        self.index.insert(source, p)?;
        Ok(edge)
    }
}

/// The ONG on a point sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OngGraph {
    sequence: PointSequence,
    /// `edges[k]` has source `k + 2`.
    edges: Vec<OngEdge>,
}

/// Builds the ONG with the grid index.
pub fn build_ong(seq: &PointSequence) -> OngGraph {
    build_ong_with(seq, NnMode::Grid).expect("grid build on a valid sequence cannot fail")
}

/// Builds the ONG with the chosen index. Only [`NnMode::Shadow`] can fail,
/// reporting a grid/oracle disagreement.
pub fn build_ong_with(seq: &PointSequence, mode: NnMode) -> Result<OngGraph> {
    let mut b = OngBuilder::new(seq.dim(), mode);
    let mut edges = Vec::with_capacity(seq.len().saturating_sub(1));
    for p in seq.iter() {
        if let Some(e) = b.push(p)? {
            edges.push(e);
        }
    }
    Ok(OngGraph { sequence: seq.clone(), edges })
}

impl OngGraph {
    pub fn sequence(&self) -> &PointSequence {
        &self.sequence
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    pub fn edges(&self) -> &[OngEdge] {
        &self.edges
    }

    /// The edge leaving point `source`, `None` for the first point.
    pub fn edge_from(&self, source: usize) -> Option<&OngEdge> {
        source.checked_sub(2).and_then(|k| self.edges.get(k))
    }

    /// Sum of `length^alpha` over all edges.
    pub fn total_weight(&self, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        Ok(self.edges.iter().map(|e| e.weight(alpha)).collect::<CompensatedSum>().value())
    }

    /// Running totals `O(X_1..X_m)` for `m = 1..=n`.
    pub fn prefix_totals(&self, alpha: f64) -> Result<Vec<f64>> {
        check_alpha(alpha)?;
        let mut acc = CompensatedSum::new();
        let mut out = Vec::with_capacity(self.len());
        if !self.is_empty() {
            out.push(0.0);
        }
        for e in &self.edges {
            acc.add(e.weight(alpha));
            out.push(acc.value());
        }
        Ok(out)
    }

    pub fn gains(&self) -> GainVector {
        let mut gains = Vec::with_capacity(self.len());
        if !self.is_empty() {
            gains.push(0.0);
        }
        gains.extend(self.edges.iter().map(OngEdge::length));
        GainVector { gains }
    }
}

/// Free-function form of [`OngGraph::total_weight`].
pub fn total_weight(g: &OngGraph, alpha: f64) -> Result<f64> {
    g.total_weight(alpha)
}

/// Free-function form of [`OngGraph::gains`].
pub fn gains(g: &OngGraph) -> GainVector {
    g.gains()
}

/// The gains `Z_1..Z_n`: `Z_i` is the length of the edge leaving point `i`,
/// and `Z_1 = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainVector {
    pub gains: Vec<f64>,
}

impl GainVector {
    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }

    /// `sum_i Z_i^alpha`.
    pub fn power_sum(&self, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        Ok(self
            .gains
            .iter()
            .map(|&z| if z == 0.0 { 0.0 } else { z.powf(alpha) })
            .collect::<CompensatedSum>()
            .value())
    }
}

/// Totals `O(X_1..X_m)` for each `m` in `checkpoints`, computed in a single
/// streaming pass without storing edges. Checkpoints beyond the sequence
/// length are an error; checkpoint 0 gives 0.
pub fn totals_at(
    seq: &PointSequence,
    alpha: f64,
    checkpoints: &[usize],
    mode: NnMode,
) -> Result<Vec<f64>> {
    Ok(totals_at_many(seq, &[alpha], checkpoints, mode)?.swap_remove(0))
}

/// [`totals_at`] for several exponents from one build; the result is
/// indexed `[alpha][checkpoint]`.
pub fn totals_at_many(
    seq: &PointSequence,
    alphas: &[f64],
    checkpoints: &[usize],
    mode: NnMode,
) -> Result<Vec<Vec<f64>>> {
    for &a in alphas {
        check_alpha(a)?;
    }
    if let Some(&m) = checkpoints.iter().find(|&&m| m > seq.len()) {
        return Err(OngError::InvalidArgument(format!(
            "checkpoint {m} exceeds sequence length {}",
            seq.len()
        )));
    }
    let mut sorted: Vec<usize> = checkpoints.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let last = sorted.last().copied().unwrap_or(0);
    let mut at: Vec<Vec<f64>> = vec![Vec::with_capacity(sorted.len()); alphas.len()];
    let mut acc = vec![CompensatedSum::new(); alphas.len()];
    let mut next = 0;
    while next < sorted.len() && sorted[next] == 0 {
        at.iter_mut().for_each(|v| v.push(0.0));
        next += 1;
    }
    let mut b = OngBuilder::new(seq.dim(), mode);
    for (k, p) in seq.iter().take(last).enumerate() {
        if let Some(e) = b.push(p)? {
            for (s, &a) in acc.iter_mut().zip(alphas) {
                s.add(e.weight(a));
            }
        }
        while next < sorted.len() && sorted[next] == k + 1 {
            for (v, s) in at.iter_mut().zip(&acc) {
                v.push(s.value());
            }
            next += 1;
        }
    }
    Ok(at
        .into_iter()
        .map(|v| checkpoints.iter().map(|m| v[sorted.binary_search(m).expect("present")]).collect())
        .collect())
}

/// `O(U_n)` on the binomial process drawn from `stream.child(POINTS)`.
pub fn binomial_total(n: usize, d: usize, alpha: f64, stream: &RandomStream, mode: NnMode) -> Result<f64> {
    check_alpha(alpha)?;
    let seq = sample_points(n, d, &mut stream.child(labels::POINTS).rng())?;
    Ok(totals_at(&seq, alpha, &[n], mode)?[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonizedTotal {
    pub count: u64,
    pub intensity: f64,
    pub total: f64,
}

/// `O(P_lambda)`: draws `N(lambda)` from `stream.child(COUNT)` and builds the
/// ONG on the first `N` points of the binomial stream `stream.child(POINTS)`,
/// so conditioning on `N = m` reproduces [`binomial_total`] at `m`.
pub fn poissonized_total(
    lambda: f64,
    d: usize,
    alpha: f64,
    stream: &RandomStream,
    mode: NnMode,
) -> Result<PoissonizedTotal> {
    let draw = sample_poisson_count(lambda, &stream.child(labels::COUNT))?;
    let count = usize::try_from(draw.count)
        .map_err(|_| OngError::InvalidArgument(format!("Poisson count {} too large", draw.count)))?;
    let total = poissonized_total_given_count(count, d, alpha, stream, mode)?;
    Ok(PoissonizedTotal { count: draw.count, intensity: lambda, total })
}

/// The Poissonized total with `N` forced to `count`.
pub fn poissonized_total_given_count(
    count: usize,
    d: usize,
    alpha: f64,
    stream: &RandomStream,
    mode: NnMode,
) -> Result<f64> {
    check_alpha(alpha)?;
    if count == 0 {
        if d == 0 {
            return Err(OngError::InvalidArgument("dimension must be at least 1".into()));
        }
        return Ok(0.0);
    }
    binomial_total(count, d, alpha, stream, mode)
}

/// Running values of the rooted functionals for `m = 1..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootedWeights {
    /// `incident[m-1]`: total weight of edges from `X_1..X_m` that attach to
    /// `x` in the ONG on `(x, X_1, ..., X_n)`.
    pub incident: Vec<f64>,
    /// `alternative[m-1]`: for the same points with arrival index at least 2,
    /// the weight of the distance to the nearest of their predecessors
    /// among `X_1..X_{i-1}` (`x` excluded).
    pub alternative: Vec<f64>,
}

/// Rooted functionals of `x` against `seq`. The index holds `x` under the
/// virtual arrival index 0.
pub fn rooted_weights(x: &Point, seq: &PointSequence, alpha: f64, mode: NnMode) -> Result<RootedWeights> {
    check_alpha(alpha)?;
    check_dim(seq.dim(), x.dim())?;
    let mut index = mode.index(seq.dim(), 0);
    index.insert(0, x.coords())?;
    let mut inc = CompensatedSum::new();
    let mut alt = CompensatedSum::new();
    let mut incident = Vec::with_capacity(seq.len());
    let mut alternative = Vec::with_capacity(seq.len());
    for (k, p) in seq.iter().enumerate() {
        let i = k + 1;
        let ans = index.nearest(p)?;
        if ans.index == 0 {
            inc.add(edge_weight(ans.squared_distance, alpha));
            if i >= 2 {
                let free = index.nearest_excluding(p, Some(0))?;
                alt.add(edge_weight(free.squared_distance, alpha));
            }
        }
        incident.push(inc.value());
        alternative.push(alt.value());
        index.insert(i, p)?;
    }
    Ok(RootedWeights { incident, alternative })
}
