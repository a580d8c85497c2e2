//! Incremental nearest-predecessor queries.
//!
//! Points are inserted in arrival order and a query returns the nearest point
//! inserted so far. Ties are broken by the comparator
//! `(squared distance, lexicographic point order, arrival index)`, so every
//! query has exactly one answer and all index implementations must agree on
//! it bit for bit.
//!
//! [`GridIndex`] is the accelerated structure used by simulations; the
//! linear-scan [`BruteForceIndex`] is its reference semantics, and
//! [`ShadowIndex`] runs both and reports any disagreement.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, OngError, Result};
use crate::geometry::{lex_cmp, sq_dist, PointSequence};

/// The answer to a nearest-predecessor query.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NnAnswer {
    /// Arrival index of the nearest stored point.
    pub index: usize,
    pub squared_distance: f64,
}

/// An index over points inserted in arrival order.
pub trait NearestIndex {
    fn dim(&self) -> usize;

    /// Number of stored points.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Arrival index expected for the first insert.
    fn base(&self) -> usize;

    /// Stores `p` under arrival index `idx`, which must equal
    /// `base() + len()`.
    fn insert(&mut self, idx: usize, p: &[f64]) -> Result<()>;

    /// Nearest stored point, skipping the point with arrival index `exclude`.
    fn nearest_excluding(&self, q: &[f64], exclude: Option<usize>) -> Result<NnAnswer>;

    fn nearest(&self, q: &[f64]) -> Result<NnAnswer> {
        self.nearest_excluding(q, None)
    }
}

/// Running minimum under the tie-break comparator. Positions are 0-based
/// insertion offsets, so position order is arrival order.
#[derive(Debug, Clone, Copy)]
struct Best<'a> {
    sq: f64,
    pos: usize,
    coords: &'a [f64],
}

#[inline]
fn offer<'a>(best: &mut Option<Best<'a>>, cand: &'a [f64], q: &[f64], pos: usize) {
    let sq = sq_dist(q, cand);
    match best {
        None => *best = Some(Best { sq, pos, coords: cand }),
        Some(b) => {
            let wins = if sq != b.sq {
                sq < b.sq
            } else {
                match lex_cmp(cand, b.coords) {
                    Ordering::Less => true,
                    Ordering::Equal => pos < b.pos,
                    Ordering::Greater => false,
                }
            };
            if wins {
                *best = Some(Best { sq, pos, coords: cand });
            }
        }
    }
}

fn check_insert(dim: usize, base: usize, len: usize, idx: usize, p: &[f64]) -> Result<()> {
    check_dim(dim, p.len())?;
    if idx != base + len {
        return Err(OngError::ContractViolation(format!(
            "insert expected arrival index {}, got {idx}",
            base + len
        )));
    }
    Ok(())
}

fn excluded_pos(base: usize, exclude: Option<usize>) -> Option<usize> {
    exclude.and_then(|e| e.checked_sub(base))
}

/// Linear scan of a sequence prefix: the reference semantics of every index.
pub fn brute_force_nearest(q: &[f64], prefix: &PointSequence) -> Result<NnAnswer> {
    check_dim(prefix.dim(), q.len())?;
    let dim = prefix.dim();
    let mut best = None;
    for (pos, cand) in prefix.flat().chunks_exact(dim).enumerate() {
        offer(&mut best, cand, q, pos);
    }
    best.map(|b| NnAnswer { index: b.pos + 1, squared_distance: b.sq })
        .ok_or(OngError::EmptyIndex)
}

/// Linear-scan index.
#[derive(Debug, Clone)]
pub struct BruteForceIndex {
    dim: usize,
    base: usize,
    coords: Vec<f64>,
}

impl BruteForceIndex {
    pub fn new(dim: usize) -> Self {
        Self::with_base(dim, 1)
    }

    pub fn with_base(dim: usize, base: usize) -> Self {
        Self { dim, base, coords: Vec::new() }
    }
}

impl NearestIndex for BruteForceIndex {
    fn dim(&self) -> usize {
        self.dim
    }

    fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    fn base(&self) -> usize {
        self.base
    }

    fn insert(&mut self, idx: usize, p: &[f64]) -> Result<()> {
        check_insert(self.dim, self.base, self.len(), idx, p)?;
        self.coords.extend_from_slice(p);
        Ok(())
    }

    fn nearest_excluding(&self, q: &[f64], exclude: Option<usize>) -> Result<NnAnswer> {
        check_dim(self.dim, q.len())?;
        let skip = excluded_pos(self.base, exclude);
        let mut best = None;
        for (pos, cand) in self.coords.chunks_exact(self.dim).enumerate() {
            if Some(pos) != skip {
                offer(&mut best, cand, q, pos);
            }
        }
        best.map(|b| NnAnswer { index: self.base + b.pos, squared_distance: b.sq })
            .ok_or(OngError::EmptyIndex)
    }
}

/// Highest dimension for which the grid refines beyond a single cell.
const MAX_GRID_DIM: usize = 16;
/// Upper limit on the number of cells.
const MAX_CELLS: usize = 1 << 22;
/// Slack subtracted from ring lower bounds to absorb rounding in cell
/// assignment; coordinates live in (0,1) so an absolute margin suffices.
const BOUND_MARGIN: f64 = 1e-12;

/// Bookkeeping of one grid query.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SearchStats {
    /// Number of rings (Chebyshev shells of cells) scanned, including ring 0.
    pub rings: usize,
    pub cells_visited: usize,
    pub points_examined: usize,
    /// The scanned block covered the whole grid.
    pub covered_all: bool,
    /// Lower bound on the distance from the query to any unscanned cell
    /// (infinite when everything was scanned).
    pub final_bound: f64,
}

/// Uniform grid over the unit cube with expanding-ring search.
///
/// The grid starts with one cell and doubles the cells per side whenever the
/// point count exceeds twice the number of cells, so the expected occupancy
/// stays bounded under uniform input without knowing `n` in advance.
#[derive(Debug, Clone)]
pub struct GridIndex {
    dim: usize,
    base: usize,
    per_side: usize,
    /// Most recently inserted member of each cell, or `NIL`.
    heads: Vec<u32>,
    /// Next older member of the same cell, per position.
    next: Vec<u32>,
    coords: Vec<f64>,
}

const NIL: u32 = u32::MAX;

impl GridIndex {
    pub fn new(dim: usize) -> Self {
        Self::with_base(dim, 1)
    }

    pub fn with_base(dim: usize, base: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        Self { dim, base, per_side: 1, heads: vec![NIL], next: Vec::new(), coords: Vec::new() }
    }

    pub fn cells_per_side(&self) -> usize {
        self.per_side
    }

    pub fn cell_side(&self) -> f64 {
        1.0 / self.per_side as f64
    }

    pub fn cell_count(&self) -> usize {
        self.heads.len()
    }

    /// Arrival indices stored in the cell with linear index `cell`.
    pub fn cell_members(&self, cell: usize) -> impl Iterator<Item = usize> + '_ {
        let mut at = self.heads[cell];
        std::iter::from_fn(move || {
            (at != NIL).then(|| {
                let p = at as usize;
                at = self.next[p];
                self.base + p
            })
        })
    }

    /// Linear cell index containing `p`.
    pub fn cell_of(&self, p: &[f64]) -> usize {
        let mut idx = 0;
        let mut stride = 1;
        for &c in p {
            idx += self.axis_cell(c) * stride;
            stride *= self.per_side;
        }
        idx
    }

    #[inline]
    fn axis_cell(&self, c: f64) -> usize {
        let t = c * self.per_side as f64;
        if t <= 0.0 {
            0
        } else {
            (t as usize).min(self.per_side - 1)
        }
    }

    fn maybe_grow(&mut self) {
        if self.dim > MAX_GRID_DIM {
            return;
        }
        let count = self.len();
        if count <= 2 * self.heads.len() {
            return;
        }
        let next = self.per_side * 2;
        let total = match next.checked_pow(self.dim as u32) {
            Some(t) if t <= MAX_CELLS => t,
            _ => return,
        };
        self.per_side = next;
        self.heads.clear();
        self.heads.resize(total, NIL);
        for pos in 0..count {
            let cell = self.cell_of(&self.coords[pos * self.dim..(pos + 1) * self.dim]);
            self.next[pos] = self.heads[cell];
            self.heads[cell] = pos as u32;
        }
    }

    /// Nearest query that also reports the search bookkeeping.
    pub fn nearest_instrumented(
        &self,
        q: &[f64],
        exclude: Option<usize>,
    ) -> Result<(NnAnswer, SearchStats)> {
        check_dim(self.dim, q.len())?;
        let skip = excluded_pos(self.base, exclude);
        let mut best = None;
        let mut stats = SearchStats::default();
        let dim = self.dim;

        if self.per_side == 1 {
            stats.points_examined += self.scan_cell(0, q, skip, &mut best);
            stats.rings = 1;
            stats.cells_visited = 1;
            stats.covered_all = true;
            stats.final_bound = f64::INFINITY;
        } else {
            let k = self.per_side;
            let side = self.cell_side();
            let mut qc = [0usize; MAX_GRID_DIM];
            for j in 0..dim {
                qc[j] = self.axis_cell(q[j]);
            }
            let mut r = 0usize;
            loop {
                self.visit_shell(&qc[..dim], r, |cell| {
                    stats.cells_visited += 1;
                    stats.points_examined += self.scan_cell(cell, q, skip, &mut best);
                });
                stats.rings = r + 1;

                let mut covered = true;
                let mut bound = f64::INFINITY;
                for j in 0..dim {
                    if qc[j] > r {
                        covered = false;
                        bound = bound.min(q[j] - (qc[j] - r) as f64 * side);
                    }
                    if qc[j] + r < k - 1 {
                        covered = false;
                        bound = bound.min((qc[j] + r + 1) as f64 * side - q[j]);
                    }
                }
                stats.final_bound = bound;
                if covered {
                    stats.covered_all = true;
                    break;
                }
                if let Some(b) = best {
                    let m = bound - BOUND_MARGIN;
                    if m > 0.0 && m * m > b.sq {
                        break;
                    }
                }
                r += 1;
            }
        }

        best.map(|b| (NnAnswer { index: self.base + b.pos, squared_distance: b.sq }, stats))
            .ok_or(OngError::EmptyIndex)
    }

    #[inline]
    fn scan_cell<'a>(&'a self, cell: usize, q: &[f64], skip: Option<usize>, best: &mut Option<Best<'a>>) -> usize {
        let dim = self.dim;
        let mut examined = 0;
        let mut at = self.heads[cell];
        while at != NIL {
            let pos = at as usize;
            if Some(pos) != skip {
                offer(best, &self.coords[pos * dim..(pos + 1) * dim], q, pos);
                examined += 1;
            }
            at = self.next[pos];
        }
        examined
    }

    /// Calls `f` on every cell at Chebyshev distance exactly `r` from the cell
    /// `qc`, clipped to the grid. Axis 0 is contiguous in the linear index, so
    /// each row along it is either scanned whole (when another axis sits on
    /// the shell) or only at its two ends.
    fn visit_shell(&self, qc: &[usize], r: usize, mut f: impl FnMut(usize)) {
        let k = self.per_side;
        let dim = qc.len();
        let lo0 = qc[0].saturating_sub(r);
        let hi0 = (qc[0] + r).min(k - 1);

        let mut lo = [0usize; MAX_GRID_DIM];
        let mut hi = [0usize; MAX_GRID_DIM];
        let mut cur = [0usize; MAX_GRID_DIM];
        for j in 1..dim {
            lo[j] = qc[j].saturating_sub(r);
            hi[j] = (qc[j] + r).min(k - 1);
            cur[j] = lo[j];
        }

        loop {
            let mut row = 0;
            let mut stride = k;
            let mut outer_on_shell = r == 0;
            for j in 1..dim {
                row += cur[j] * stride;
                stride *= k;
                if cur[j] + r == qc[j] || cur[j] == qc[j] + r {
                    outer_on_shell = true;
                }
            }
            if outer_on_shell {
                for c0 in lo0..=hi0 {
                    f(row + c0);
                }
            } else {
                if qc[0] >= r {
                    f(row + qc[0] - r);
                }
                if qc[0] + r < k {
                    f(row + qc[0] + r);
                }
            }

            let mut j = 1;
            loop {
                if j >= dim {
                    return;
                }
                if cur[j] < hi[j] {
                    cur[j] += 1;
                    break;
                }
                cur[j] = lo[j];
                j += 1;
            }
        }
    }
}

impl NearestIndex for GridIndex {
    fn dim(&self) -> usize {
        self.dim
    }

    fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    fn base(&self) -> usize {
        self.base
    }

    fn insert(&mut self, idx: usize, p: &[f64]) -> Result<()> {
        check_insert(self.dim, self.base, self.len(), idx, p)?;
        let pos = self.len();
        if pos >= NIL as usize {
            return Err(OngError::ContractViolation("grid index holds at most 2^32 points".into()));
        }
        self.coords.extend_from_slice(p);
        let cell = self.cell_of(p);
        self.next.push(self.heads[cell]);
        self.heads[cell] = pos as u32;
        self.maybe_grow();
        Ok(())
    }

    fn nearest_excluding(&self, q: &[f64], exclude: Option<usize>) -> Result<NnAnswer> {
        self.nearest_instrumented(q, exclude).map(|(a, _)| a)
    }
}

/// Grid index checked against the brute-force oracle on every query.
#[derive(Debug, Clone)]
pub struct ShadowIndex {
    grid: GridIndex,
    oracle: BruteForceIndex,
}

impl ShadowIndex {
    pub fn new(dim: usize) -> Self {
        Self::with_base(dim, 1)
    }

    pub fn with_base(dim: usize, base: usize) -> Self {
        Self { grid: GridIndex::with_base(dim, base), oracle: BruteForceIndex::with_base(dim, base) }
    }
}

impl NearestIndex for ShadowIndex {
    fn dim(&self) -> usize {
        self.grid.dim()
    }

    fn len(&self) -> usize {
        self.grid.len()
    }

    fn base(&self) -> usize {
        self.grid.base()
    }

    fn insert(&mut self, idx: usize, p: &[f64]) -> Result<()> {
        self.oracle.insert(idx, p)?;
        self.grid.insert(idx, p)
    }

    fn nearest_excluding(&self, q: &[f64], exclude: Option<usize>) -> Result<NnAnswer> {
        let g = self.grid.nearest_excluding(q, exclude)?;
        let o = self.oracle.nearest_excluding(q, exclude)?;
        if g.index != o.index || g.squared_distance.to_bits() != o.squared_distance.to_bits() {
            return Err(OngError::OracleMismatch {
                grid_index: g.index,
                grid_sq: g.squared_distance,
                oracle_index: o.index,
                oracle_sq: o.squared_distance,
            });
        }
        Ok(g)
    }
}

/// Which index backs a graph build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NnMode {
    #[default]
    Grid,
    BruteForce,
    /// Grid answers verified against brute force on every query.
    Shadow,
}

impl NnMode {
    pub fn index(self, dim: usize, base: usize) -> AnyIndex {
        match self {
            NnMode::Grid => AnyIndex::Grid(GridIndex::with_base(dim, base)),
            NnMode::BruteForce => AnyIndex::BruteForce(BruteForceIndex::with_base(dim, base)),
            NnMode::Shadow => AnyIndex::Shadow(ShadowIndex::with_base(dim, base)),
        }
    }
}

#[derive(Debug, Clone)]
pub enum AnyIndex {
    Grid(GridIndex),
    BruteForce(BruteForceIndex),
    Shadow(ShadowIndex),
}

macro_rules! dispatch {
    ($self:ident, $i:ident => $e:expr) => {
        match $self {
            AnyIndex::Grid($i) => $e,
            AnyIndex::BruteForce($i) => $e,
            AnyIndex::Shadow($i) => $e,
        }
    };
}

impl NearestIndex for AnyIndex {
    fn dim(&self) -> usize {
        dispatch!(self, i => i.dim())
    }

    fn len(&self) -> usize {
        dispatch!(self, i => i.len())
    }

    fn base(&self) -> usize {
        dispatch!(self, i => i.base())
    }

    fn insert(&mut self, idx: usize, p: &[f64]) -> Result<()> {
        dispatch!(self, i => i.insert(idx, p))
    }

    fn nearest_excluding(&self, q: &[f64], exclude: Option<usize>) -> Result<NnAnswer> {
        dispatch!(self, i => i.nearest_excluding(q, exclude))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{sample_points, RandomStream};
    use proptest::prelude::*;
    use rand::Rng;

    fn filled<I: NearestIndex>(mut idx: I, seq: &PointSequence) -> I {
        for (k, p) in seq.iter().enumerate() {
            idx.insert(idx.base() + k, p).unwrap();
        }
        idx
    }

    #[test]
    fn lexicographic_tie_break() {
        // Dyadic coordinates so the two distances tie exactly in floating point.
        let seq = PointSequence::from_scalars(&[0.75, 0.25]).unwrap();
        for idx in [NnMode::Grid, NnMode::BruteForce, NnMode::Shadow] {
            let idx = filled(idx.index(1, 1), &seq);
            let a = idx.nearest(&[0.5]).unwrap();
            assert_eq!(a.index, 2, "{idx:?}");
        }
        assert_eq!(brute_force_nearest(&[0.5], &seq).unwrap().index, 2);

        // 0.3 and 0.7 are not equidistant from 0.5 in binary floating point;
        // the strictly smaller computed distance decides.
        let seq = PointSequence::from_scalars(&[0.3, 0.7]).unwrap();
        let a = brute_force_nearest(&[0.5], &seq).unwrap();
        assert_eq!(a.index, 2);
    }

    #[test]
    fn duplicate_points_prefer_earliest_arrival() {
        let seq = PointSequence::from_rows(&[vec![0.4, 0.4], vec![0.2, 0.2], vec![0.4, 0.4]]).unwrap();
        let idx = filled(GridIndex::new(2), &seq);
        let a = idx.nearest(&[0.41, 0.41]).unwrap();
        assert_eq!(a.index, 1);
        assert_eq!(idx.nearest_excluding(&[0.41, 0.41], Some(1)).unwrap().index, 3);
    }

    #[test]
    fn single_predecessor_and_exact_hit() {
        let seq = PointSequence::from_scalars(&[0.42]).unwrap();
        let idx = filled(GridIndex::new(1), &seq);
        assert_eq!(idx.nearest(&[0.9]).unwrap().index, 1);

        let seq = PointSequence::from_rows(&[vec![0.1, 0.2], vec![0.6, 0.6], vec![0.3, 0.9]]).unwrap();
        let a = brute_force_nearest(&[0.6, 0.6], &seq).unwrap();
        assert_eq!((a.index, a.squared_distance), (2, 0.0));
    }

    #[test]
    fn empty_index_errors() {
        assert_eq!(GridIndex::new(2).nearest(&[0.5, 0.5]), Err(OngError::EmptyIndex));
        assert_eq!(BruteForceIndex::new(2).nearest(&[0.5, 0.5]), Err(OngError::EmptyIndex));
        let empty = PointSequence::empty(1).unwrap();
        assert_eq!(brute_force_nearest(&[0.5], &empty), Err(OngError::EmptyIndex));
        let mut g = GridIndex::with_base(1, 0);
        g.insert(0, &[0.5]).unwrap();
        assert_eq!(g.nearest_excluding(&[0.5], Some(0)), Err(OngError::EmptyIndex));
    }

    #[test]
    fn insert_contract() {
        let mut g = GridIndex::new(2);
        g.insert(1, &[0.1, 0.1]).unwrap();
        assert!(matches!(g.insert(3, &[0.2, 0.2]), Err(OngError::ContractViolation(_))));
        assert!(matches!(g.insert(2, &[0.2]), Err(OngError::DimensionMismatch { .. })));
        g.insert(2, &[0.2, 0.2]).unwrap();
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn grid_bookkeeping() {
        let mut rng = RandomStream::new(77).rng();
        let seq = sample_points(1000, 2, &mut rng).unwrap();
        let g = filled(GridIndex::new(2), &seq);
        assert_eq!(g.len(), 1000);
        assert!(g.len() <= 2 * g.cell_count());
        let mut seen = vec![0usize; 1001];
        for cell in 0..g.cell_count() {
            for a in g.cell_members(cell) {
                assert_eq!(g.cell_of(seq.coords_of(a)), cell);
                seen[a] += 1;
            }
        }
        assert!(seen[1..].iter().all(|&c| c == 1));
    }

    #[test]
    fn one_dimensional_answer_is_an_order_neighbour() {
        let mut rng = RandomStream::new(5).rng();
        for _ in 0..200 {
            let seq = sample_points(rng.random_range(1..60), 1, &mut rng).unwrap();
            let q: f64 = rng.random_range(0.01..0.99);
            let a = brute_force_nearest(&[q], &seq).unwrap();
            let left = seq.iter().map(|p| p[0]).filter(|&v| v <= q).fold(f64::NEG_INFINITY, f64::max);
            let right = seq.iter().map(|p| p[0]).filter(|&v| v >= q).fold(f64::INFINITY, f64::min);
            let got = seq.coords_of(a.index)[0];
            assert!(got == left || got == right);
        }
    }

    /// Instances for oracle comparison: uniform, clustered and lattice points.
    fn instance(rng: &mut impl Rng) -> (usize, PointSequence) {
        let d = rng.random_range(1..=3);
        let n = rng.random_range(1..=300);
        let style = rng.random_range(0..3);
        let mut flat = Vec::with_capacity(n * d);
        for _ in 0..n * d {
            let c = match style {
                0 => crate::rng::uniform_open01(rng),
                1 => 0.5 + 0.01 * (crate::rng::uniform_open01(rng) - 0.5),
                _ => rng.random_range(1..16) as f64 / 16.0,
            };
            flat.push(c);
        }
        (d, PointSequence::from_flat(d, flat).unwrap())
    }

    #[test]
    fn grid_matches_oracle_on_random_instances() {
        let mut rng = RandomStream::new(2024).rng();
        for _ in 0..500 {
            let (d, seq) = instance(&mut rng);
            let mut grid = GridIndex::new(d);
            let mut brute = BruteForceIndex::new(d);
            for (k, p) in seq.iter().enumerate() {
                if k > 0 {
                    let (g, stats) = grid.nearest_instrumented(p, None).unwrap();
                    let o = brute.nearest(p).unwrap();
                    assert_eq!(g.index, o.index);
                    assert_eq!(g.squared_distance.to_bits(), o.squared_distance.to_bits());
                    // Expanding-ring completeness.
                    let m = stats.final_bound - BOUND_MARGIN;
                    assert!(stats.covered_all || (m > 0.0 && m * m > g.squared_distance));
                }
                grid.insert(k + 1, p).unwrap();
                brute.insert(k + 1, p).unwrap();
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn answer_distance_shrinks_monotonically(seed in any::<u64>(), d in 1usize..=3) {
            let mut rng = RandomStream::new(seed).rng();
            let q = crate::rng::uniform_point(d, &mut rng);
            let seq = sample_points(200, d, &mut rng).unwrap();
            let mut grid = GridIndex::new(d);
            let mut last = f64::INFINITY;
            for (k, p) in seq.iter().enumerate() {
                grid.insert(k + 1, p).unwrap();
                let a = grid.nearest(&q).unwrap();
                prop_assert!(a.squared_distance <= last);
                prop_assert_eq!(a.squared_distance, sq_dist(&q, seq.coords_of(a.index)));
                last = a.squared_distance;
            }
        }

        #[test]
        fn shadow_never_mismatches(seed in any::<u64>(), d in 1usize..=4, n in 1usize..150) {
            let mut rng = RandomStream::new(seed).rng();
            let seq = sample_points(n, d, &mut rng).unwrap();
            let mut idx = ShadowIndex::new(d);
            for (k, p) in seq.iter().enumerate() {
                if k > 0 {
                    prop_assert!(idx.nearest(p).is_ok());
                }
                idx.insert(k + 1, p).unwrap();
            }
        }
    }
}
