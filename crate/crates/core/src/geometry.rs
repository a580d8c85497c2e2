//! Points in the open unit cube and the two primitives every other module is
//! built on: lexicographic order and squared Euclidean distance.
//!
//! A [`PointSequence`] stores its coordinates in one flat buffer with stride
//! `d`. Arrival indices are 1-based, matching the order in which the points
//! were drawn.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, OngError, Result};

/// A point of `(0,1)^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    /// Every coordinate must lie strictly between 0 and 1.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(OngError::InvalidArgument("a point needs at least one coordinate".into()));
        }
        if let Some(c) = coords.iter().find(|c| !(**c > 0.0 && **c < 1.0)) {
            return Err(OngError::InvalidArgument(format!(
                "coordinate {c} lies outside the open unit interval"
            )));
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = OngError;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Point::new(coords)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.coords
    }
}

/// Dictionary order on coordinate lists.
pub fn lex_compare(a: &Point, b: &Point) -> Result<Ordering> {
    check_dim(a.dim(), b.dim())?;
    Ok(lex_cmp(&a.coords, &b.coords))
}

/// Squared Euclidean distance.
pub fn squared_distance(a: &Point, b: &Point) -> Result<f64> {
    check_dim(a.dim(), b.dim())?;
    Ok(sq_dist(&a.coords, &b.coords))
}

/// Unchecked lexicographic comparison of two equal-length coordinate slices.
#[inline]
pub fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    debug_assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Unchecked squared distance of two equal-length coordinate slices.
#[inline]
pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let t = x - y;
            t * t
        })
        .sum()
}

/// An ordered sequence of points of a common dimension.
///
/// Order is significant: the point at position `k` (0-based) has arrival
/// index `k + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSequence {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSequence {
    /// The empty sequence in dimension `dim`.
    pub fn empty(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(OngError::InvalidArgument("dimension must be at least 1".into()));
        }
        Ok(Self { dim, coords: Vec::new() })
    }

    pub fn from_points(dim: usize, points: &[Point]) -> Result<Self> {
        let mut seq = Self::empty(dim)?;
        seq.coords.reserve(points.len() * dim);
        for p in points {
            check_dim(dim, p.dim())?;
            seq.coords.extend_from_slice(p.coords());
        }
        Ok(seq)
    }

    /// Builds a sequence from a flat coordinate buffer of stride `dim`.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(OngError::InvalidArgument("dimension must be at least 1".into()));
        }
        if coords.len() % dim != 0 {
            return Err(OngError::InvalidArgument(format!(
                "buffer of length {} is not a multiple of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(c) = coords.iter().find(|c| !(**c > 0.0 && **c < 1.0)) {
            return Err(OngError::InvalidArgument(format!(
                "coordinate {c} lies outside the open unit interval"
            )));
        }
        Ok(Self { dim, coords })
    }

    /// Convenience for 1-D sequences.
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        Self::from_flat(1, values.to_vec())
    }

    /// Builds a sequence from nested coordinate lists.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(1, Vec::len);
        let mut flat = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            check_dim(dim, r.len())?;
            flat.extend_from_slice(r);
        }
        Self::from_flat(dim, flat)
    }

    /// Internal constructor for buffers produced by the samplers.
    pub(crate) fn from_flat_unchecked(dim: usize, coords: Vec<f64>) -> Self {
        debug_assert!(dim > 0 && coords.len() % dim == 0);
        Self { dim, coords }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Coordinates of the point with 1-based arrival index `arrival`.
    ///
    /// Panics if `arrival` is 0 or exceeds the length.
    pub fn coords_of(&self, arrival: usize) -> &[f64] {
        assert!(arrival >= 1 && arrival <= self.len(), "arrival index {arrival} out of range");
        let start = (arrival - 1) * self.dim;
        &self.coords[start..start + self.dim]
    }

    pub fn point(&self, arrival: usize) -> Point {
        Point { coords: self.coords_of(arrival).to_vec() }
    }

    /// Coordinate slices in arrival order.
    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn flat(&self) -> &[f64] {
        &self.coords
    }

    /// The first `m` points (clamped to the length).
    pub fn prefix(&self, m: usize) -> PointSequence {
        let m = m.min(self.len());
        Self { dim: self.dim, coords: self.coords[..m * self.dim].to_vec() }
    }

    /// The sequence with the point at arrival index `i` replaced by `p`.
    pub fn with_replaced(&self, i: usize, p: &Point) -> Result<PointSequence> {
        self.check_index(i)?;
        check_dim(self.dim, p.dim())?;
        let mut coords = self.coords.clone();
        let start = (i - 1) * self.dim;
        coords[start..start + self.dim].copy_from_slice(p.coords());
        Ok(Self { dim: self.dim, coords })
    }

    /// The sequence with the point at arrival index `i` deleted; later points
    /// keep their relative order.
    pub fn without(&self, i: usize) -> Result<PointSequence> {
        self.check_index(i)?;
        let mut coords = self.coords.clone();
        let start = (i - 1) * self.dim;
        coords.drain(start..start + self.dim);
        Ok(Self { dim: self.dim, coords })
    }

    /// The sequence `(x, X_1, ..., X_n)`.
    pub fn prefixed_by(&self, x: &Point) -> Result<PointSequence> {
        check_dim(self.dim, x.dim())?;
        let mut coords = Vec::with_capacity(self.coords.len() + self.dim);
        coords.extend_from_slice(x.coords());
        coords.extend_from_slice(&self.coords);
        Ok(Self { dim: self.dim, coords })
    }

    pub fn push(&mut self, p: &Point) -> Result<()> {
        check_dim(self.dim, p.dim())?;
        self.coords.extend_from_slice(p.coords());
        Ok(())
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.len() {
            return Err(OngError::InvalidArgument(format!(
                "index {i} outside 1..={}",
                self.len()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn lex_examples() {
        assert_eq!(lex_compare(&p(&[0.3]), &p(&[0.5])).unwrap(), Ordering::Less);
        assert_eq!(lex_compare(&p(&[0.2, 0.9]), &p(&[0.2, 0.1])).unwrap(), Ordering::Greater);
        assert_eq!(lex_compare(&p(&[0.4, 0.4]), &p(&[0.4, 0.4])).unwrap(), Ordering::Equal);
    }

    #[test]
    fn distance_examples() {
        assert!((squared_distance(&p(&[0.3]), &p(&[0.7])).unwrap() - 0.16).abs() < 1e-15);
        let d2 = squared_distance(&p(&[0.1, 0.1]), &p(&[0.9, 0.9])).unwrap();
        assert!((d2 - 1.28).abs() < 1e-15);
        let a = p(&[0.25, 0.5, 0.75]);
        assert_eq!(squared_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let err = lex_compare(&p(&[0.3]), &p(&[0.3, 0.4])).unwrap_err();
        assert_eq!(err, OngError::DimensionMismatch { expected: 1, found: 2 });
        assert!(squared_distance(&p(&[0.3, 0.1]), &p(&[0.3])).is_err());
    }

    #[test]
    fn point_rejects_closed_boundary() {
        assert!(Point::new(vec![0.0]).is_err());
        assert!(Point::new(vec![0.5, 1.0]).is_err());
        assert!(Point::new(vec![f64::NAN]).is_err());
        assert!(Point::new(vec![]).is_err());
    }

    #[test]
    fn sequence_edits() {
        let s = PointSequence::from_scalars(&[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(s.without(2).unwrap().flat(), &[0.1, 0.3]);
        assert_eq!(s.with_replaced(3, &p(&[0.9])).unwrap().flat(), &[0.1, 0.2, 0.9]);
        assert_eq!(s.prefixed_by(&p(&[0.5])).unwrap().flat(), &[0.5, 0.1, 0.2, 0.3]);
        assert_eq!(s.prefix(2).len(), 2);
        assert!(s.without(0).is_err());
        assert!(s.without(4).is_err());
    }

    fn coords(d: usize) -> impl Strategy<Value = Vec<f64>> {
        // A coarse lattice makes exact ties common.
        prop::collection::vec((1u32..8).prop_map(|k| k as f64 / 8.0), d)
    }

    proptest! {
        #[test]
        fn lex_is_a_total_order(a in coords(3), b in coords(3), c in coords(3)) {
            let ab = lex_cmp(&a, &b);
            prop_assert_eq!(ab, lex_cmp(&b, &a).reverse());
            prop_assert_eq!(ab == Ordering::Equal, a == b);
            if ab != Ordering::Greater && lex_cmp(&b, &c) != Ordering::Greater {
                prop_assert_ne!(lex_cmp(&a, &c), Ordering::Greater);
            }
        }

        #[test]
        fn distance_is_a_metric(a in coords(2), b in coords(2), c in coords(2)) {
            let ab = sq_dist(&a, &b);
            prop_assert_eq!(ab, sq_dist(&b, &a));
            prop_assert_eq!(ab == 0.0, a == b);
            let tri = sq_dist(&a, &c).sqrt();
            prop_assert!(tri <= ab.sqrt() + sq_dist(&b, &c).sqrt() + 1e-12);
        }
    }
}
