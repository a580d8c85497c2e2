//! Streaming estimators and log-log slope fits.
//!
//! [`EstimateSummary`] tracks the count, mean and central moment sums up to
//! order four with the one-pass recurrences of Welford and Pébay, and merges
//! partial summaries exactly (up to rounding), so replicate results can be
//! reduced in any tree shape.

use serde::{Deserialize, Serialize};

use crate::error::{OngError, Result};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Count, mean and the second to fourth central moment sums of a sample.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EstimateSummary {
    pub count: u64,
    pub mean: f64,
    /// Sum of squared deviations from the mean.
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
}

/// Confidence levels supported by [`EstimateSummary::variance_ci`].
const CI_LEVELS: [(f64, f64); 3] = [
    (0.90, 1.644_853_626_951_472_2),
    (0.95, 1.959_963_984_540_054),
    (0.99, 2.575_829_303_548_900_4),
];

impl EstimateSummary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let mut s = Self::new();
        for &x in samples {
            s.push(x)?;
        }
        Ok(s)
    }

    /// Adds one sample in place.
    pub fn push(&mut self, x: f64) -> Result<()> {
        if !x.is_finite() {
            return Err(OngError::NonFinite(x));
        }
        let n1 = self.count as f64;
        self.count += 1;
        let n = self.count as f64;
        let delta = x - self.mean;
        let delta_n = delta / n;
        let delta_n2 = delta_n * delta_n;
        let term1 = delta * delta_n * n1;
        self.mean += delta_n;
        self.m4 += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * self.m2
            - 4.0 * delta_n * self.m3;
        self.m3 += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * self.m2;
        self.m2 += term1;
        Ok(())
    }

    /// Value-style update.
    pub fn update(mut self, x: f64) -> Result<Self> {
        self.push(x)?;
        Ok(self)
    }

    /// Summary of the concatenation of both samples.
    pub fn merge(&self, other: &Self) -> Self {
        if other.count == 0 {
            return *self;
        }
        if self.count == 0 {
            return *other;
        }
        let na = self.count as f64;
        let nb = other.count as f64;
        let n = na + nb;
        let delta = other.mean - self.mean;
        let d2 = delta * delta;
        let d3 = d2 * delta;
        let d4 = d2 * d2;
        let mean = self.mean + delta * nb / n;
        let m2 = self.m2 + other.m2 + d2 * na * nb / n;
        let m3 = self.m3
            + other.m3
            + d3 * na * nb * (na - nb) / (n * n)
            + 3.0 * delta * (na * other.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + other.m4
            + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * other.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * delta * (na * other.m3 - nb * self.m3) / n;
        Self { count: self.count + other.count, mean, m2, m3, m4 }
    }

    /// Unbiased sample variance; `None` below two samples.
    pub fn variance(&self) -> Option<f64> {
        (self.count >= 2).then(|| self.m2 / (self.count - 1) as f64)
    }

    /// Standard error of the mean; `None` below two samples.
    pub fn stderr(&self) -> Option<f64> {
        self.variance().map(|v| (v / self.count as f64).sqrt())
    }

    /// Standard error of the sample variance from the fourth central moment.
    pub fn variance_stderr(&self) -> Option<f64> {
        if self.count < 4 {
            return None;
        }
        let n = self.count as f64;
        let s2 = self.m2 / (n - 1.0);
        let mu4 = self.m4 / n;
        let v = (mu4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n;
        Some(v.max(0.0).sqrt())
    }

    /// Normal-approximation confidence interval for the variance at level
    /// 0.90, 0.95 or 0.99. Needs at least 30 samples.
    pub fn variance_ci(&self, level: f64) -> Result<(f64, f64)> {
        let z = CI_LEVELS
            .iter()
            .find(|(l, _)| (l - level).abs() < 1e-12)
            .map(|(_, z)| *z)
            .ok_or_else(|| {
                OngError::InvalidArgument(format!("unsupported confidence level {level}"))
            })?;
        if self.count < 30 {
            return Err(OngError::InsufficientData(format!(
                "variance interval needs at least 30 samples, have {}",
                self.count
            )));
        }
        let var = self.variance().expect("count >= 30");
        let se = self.variance_stderr().expect("count >= 30");
        Ok(((var - z * se).max(0.0), var + z * se))
    }
}

/// Ordinary (optionally weighted) least squares on `(ln n, ln y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r_squared: f64,
    /// The fitted `(ln n, ln y)` pairs.
    pub points: Vec<(f64, f64)>,
}

impl SlopeFit {
    /// Fitted value of `ln y` at `ln n = x`.
    pub fn predict_log(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

/// Fits `ln y = intercept + slope * ln n` to at least three points with
/// `n >= 2` and `y > 0`.
pub fn loglog_slope(points: &[(f64, f64)], weights: Option<&[f64]>) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(OngError::InsufficientData(format!(
            "a slope fit needs at least 3 points, have {}",
            points.len()
        )));
    }
    if let Some(w) = weights {
        if w.len() != points.len() {
            return Err(OngError::InvalidArgument("one weight per point is required".into()));
        }
        if w.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(OngError::InvalidArgument("weights must be positive and finite".into()));
        }
    }
    let mut logs = Vec::with_capacity(points.len());
    for &(n, y) in points {
        if !(n >= 2.0 && n.is_finite()) {
            return Err(OngError::InvalidArgument(format!("abscissa {n} must be at least 2")));
        }
        if !(y > 0.0 && y.is_finite()) {
            return Err(OngError::InvalidArgument(format!("ordinate {y} must be positive")));
        }
        logs.push((n.ln(), y.ln()));
    }
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);

    let sw: f64 = (0..logs.len()).map(w).sum();
    let xbar = logs.iter().enumerate().map(|(i, p)| w(i) * p.0).sum::<f64>() / sw;
    let ybar = logs.iter().enumerate().map(|(i, p)| w(i) * p.1).sum::<f64>() / sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (i, &(x, y)) in logs.iter().enumerate() {
        let dx = x - xbar;
        let dy = y - ybar;
        sxx += w(i) * dx * dx;
        sxy += w(i) * dx * dy;
        syy += w(i) * dy * dy;
    }
    if sxx <= 0.0 {
        return Err(OngError::InvalidArgument("abscissae must not all coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ssr: f64 = logs
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| {
            let e = y - (intercept + slope * x);
            w(i) * e * e
        })
        .sum();
    let dof = (logs.len() - 2) as f64;
    let slope_stderr = (ssr / dof / sxx).sqrt();
    let r_squared = if syy > 0.0 { (1.0 - ssr / syy).clamp(0.0, 1.0) } else { 1.0 };
    Ok(SlopeFit { slope, intercept, slope_stderr, r_squared, points: logs })
}
