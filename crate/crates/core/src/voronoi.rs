//! Voronoi cell diameters and the one-dimensional cone radius.
//!
//! `V_n(x)` is the set of `y` in the cube with `|x - y| <= |y - U_j|` for
//! every prefix point `U_j`. In one dimension it is an interval bounded by
//! the midpoints towards the nearest prefix points on either side (or by
//! the cube), so its diameter is exact.
//!
//! In higher dimensions the cell is a convex polytope. Along a unit
//! direction `theta` the ray from `x` leaves the cell at
//!
//! ```text
//! t(theta) = min( min over <u - x, theta> > 0 of |u - x|^2 / (2 <u - x, theta>),
//!                 distance to the cube boundary )
//! ```
//!
//! and the estimate is the largest pairwise distance among `x` and the exit
//! points of `sample_count` rays. Every exit point lies in the cell, so the
//! value never exceeds the true diameter and increases towards it as rays
//! are added.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, OngError, Result};
use crate::geometry::{Point, PointSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiameterMethod {
    Exact,
    /// Ray-cast lower bound.
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoronoiDiameterEstimate {
    pub x: Point,
    pub n: usize,
    pub value: f64,
    pub method: DiameterMethod,
    /// Number of rays; 0 for exact values.
    pub sample_count: usize,
}

/// Nearest prefix points at or below and at or above `x` in one dimension.
fn neighbours_1d(x: f64, prefix: &PointSequence) -> (Option<f64>, Option<f64>) {
    let mut left: Option<f64> = None;
    let mut right: Option<f64> = None;
    for &u in prefix.flat() {
        if u <= x && left.is_none_or(|l| u > l) {
            left = Some(u);
        }
        if u >= x && right.is_none_or(|r| u < r) {
            right = Some(u);
        }
    }
    (left, right)
}

fn check_prefix(x: &Point, prefix: &PointSequence) -> Result<()> {
    check_dim(prefix.dim(), x.dim())?;
    if prefix.is_empty() {
        return Err(OngError::InvalidArgument("the prefix must contain at least one point".into()));
    }
    Ok(())
}

/// Diameter of `V_n(x)` for the prefix `U_1..U_n`. Exact in one dimension;
/// a ray-cast lower bound with `sample_count` rays otherwise. A prefix point
/// equal to `x` collapses the cell to `{x}`.
pub fn voronoi_diameter<R: Rng + ?Sized>(
    x: &Point,
    prefix: &PointSequence,
    sample_count: usize,
    rng: &mut R,
) -> Result<VoronoiDiameterEstimate> {
    check_prefix(x, prefix)?;
    let n = prefix.len();
    if x.dim() == 1 {
        let xv = x.coords()[0];
        let (l, r) = neighbours_1d(xv, prefix);
        let lo = l.map_or(0.0, |l| 0.5 * (l + xv));
        let hi = r.map_or(1.0, |r| 0.5 * (xv + r));
        return Ok(VoronoiDiameterEstimate {
            x: x.clone(),
            n,
            value: hi - lo,
            method: DiameterMethod::Exact,
            sample_count: 0,
        });
    }
    if sample_count < 2 {
        return Err(OngError::InvalidArgument("at least 2 rays are required".into()));
    }
    let dirs = directions(x.dim(), sample_count, rng);
    let value = ray_cast_diameter(x.coords(), prefix, &dirs);
    Ok(VoronoiDiameterEstimate { x: x.clone(), n, value, method: DiameterMethod::Sampled, sample_count })
}

/// Unit directions: evenly spaced angles with a random offset in the plane,
/// normalised Gaussian vectors above.
fn directions<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    if d == 2 {
        let phase: f64 = rng.random::<f64>() * std::f64::consts::TAU / k as f64;
        return (0..k)
            .map(|j| {
                let a = phase + std::f64::consts::TAU * j as f64 / k as f64;
                vec![a.cos(), a.sin()]
            })
            .collect();
    }
    (0..k)
        .map(|_| loop {
            let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm > 1e-12 {
                break v.into_iter().map(|c| c / norm).collect();
            }
        })
        .collect()
}

fn ray_cast_diameter(x: &[f64], prefix: &PointSequence, dirs: &[Vec<f64>]) -> f64 {
    let d = x.len();
    // Exit distances through the cube boundary.
    let mut t: Vec<f64> = dirs
        .iter()
        .map(|th| {
            (0..d)
                .map(|j| {
                    if th[j] > 0.0 {
                        (1.0 - x[j]) / th[j]
                    } else if th[j] < 0.0 {
                        -x[j] / th[j]
                    } else {
                        f64::INFINITY
                    }
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect();

    // A point at distance r only cuts rays at distance >= r/2, so points are
    // scanned outward and the scan stops once none can cut any more.
    let mut by_dist: Vec<(f64, usize)> = prefix
        .iter()
        .enumerate()
        .map(|(k, u)| (crate::geometry::sq_dist(u, x), k))
        .collect();
    by_dist.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut diff = vec![0.0; d];
    for &(sq, k) in &by_dist {
        let reach = t.iter().copied().fold(0.0, f64::max);
        if sq > 4.0 * reach * reach {
            break;
        }
        if sq == 0.0 {
            return 0.0;
        }
        let u = prefix.coords_of(k + 1);
        for j in 0..d {
            diff[j] = u[j] - x[j];
        }
        for (th, tk) in dirs.iter().zip(t.iter_mut()) {
            let dot: f64 = diff.iter().zip(th).map(|(a, b)| a * b).sum();
            if dot > 0.0 {
                let cut = sq / (2.0 * dot);
                if cut < *tk {
                    *tk = cut;
                }
            }
        }
    }

    let ends: Vec<Vec<f64>> =
        dirs.iter().zip(&t).map(|(th, &tk)| (0..d).map(|j| x[j] + tk * th[j]).collect()).collect();
    let mut best = t.iter().copied().fold(0.0, f64::max);
    for a in 0..ends.len() {
        for b in a + 1..ends.len() {
            best = best.max(crate::geometry::sq_dist(&ends[a], &ends[b]).sqrt());
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeRadius1D {
    pub x: Point,
    pub n: usize,
    pub value: f64,
}

/// `R_n(x)` in one dimension: the larger of the two one-sided thresholds,
/// each the distance to the nearest prefix point on that side capped by the
/// distance to the cube boundary.
pub fn cone_radius_1d(x: &Point, prefix: &PointSequence) -> Result<ConeRadius1D> {
    if x.dim() != 1 {
        return Err(OngError::UnsupportedDimension(x.dim()));
    }
    check_prefix(x, prefix)?;
    let xv = x.coords()[0];
    let (l, r) = neighbours_1d(xv, prefix);
    let t_left = l.map_or(xv, |l| (xv - l).min(xv));
    let t_right = r.map_or(1.0 - xv, |r| (r - xv).min(1.0 - xv));
    Ok(ConeRadius1D { x: x.clone(), n: prefix.len(), value: t_left.max(t_right) })
}
