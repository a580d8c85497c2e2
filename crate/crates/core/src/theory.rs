//! Closed-form constants of the on-line nearest-neighbour graph on uniform
//! points: the unit-ball volume, the law-of-large-numbers constant, the
//! one-dimensional limit mean for `alpha > 1`, the leading term of the
//! expected gain, and the predicted mean and variance regimes.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{OngError, Result};

/// Relative tolerance used to decide `alpha == d` and `alpha == d/2`.
const REGIME_EPS: f64 = 1e-12;

fn check_d(d: usize) -> Result<()> {
    if d == 0 {
        return Err(OngError::InvalidArgument("dimension must be at least 1".into()));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(OngError::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    Ok(())
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= REGIME_EPS * b.abs()
}

/// Volume of the unit-radius Euclidean ball in `d` dimensions,
/// `pi^(d/2) / Gamma(1 + d/2)`.
pub fn unit_ball_volume(d: usize) -> Result<f64> {
    check_d(d)?;
    let h = d as f64 / 2.0;
    Ok(std::f64::consts::PI.powf(h) / gamma(1.0 + h))
}

/// Limit of `n^((alpha-d)/d) * O(U_n)` for `0 < alpha < d`:
/// `d/(d-alpha) * v_d^(-alpha/d) * Gamma(1 + alpha/d)`.
pub fn lln_constant(d: usize, alpha: f64) -> Result<f64> {
    check_d(d)?;
    check_alpha(alpha)?;
    let df = d as f64;
    if alpha >= df || same(alpha, df) {
        return Err(OngError::Regime(format!(
            "the power-law constant needs alpha < d; alpha = {alpha}, d = {d} is in the {} regime",
            if same(alpha, df) { "logarithmic" } else { "convergent" }
        )));
    }
    let vd = unit_ball_volume(d)?;
    Ok(df / (df - alpha) * vd.powf(-alpha / df) * gamma(1.0 + alpha / df))
}

/// Limit mean of `O(U_n)` in one dimension for `alpha > 1`:
/// `2/(alpha(alpha+1)) * (1 + 2^(-alpha)/(alpha-1))`.
pub fn mu_1d(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha <= 1.0 {
        return Err(OngError::Regime(format!("the one-dimensional limit mean needs alpha > 1, got {alpha}")));
    }
    Ok(2.0 / (alpha * (alpha + 1.0)) * (1.0 + 2f64.powf(-alpha) / (alpha - 1.0)))
}

/// `v_d^(-alpha/d) * Gamma(1 + alpha/d)`, the coefficient of `n^(-alpha/d)`
/// in the expected gain `E[Z_n^alpha]`.
pub fn gain_leading_coefficient(d: usize, alpha: f64) -> Result<f64> {
    check_d(d)?;
    check_alpha(alpha)?;
    let df = d as f64;
    Ok(unit_ball_volume(d)?.powf(-alpha / df) * gamma(1.0 + alpha / df))
}

/// Leading term of `E[Z_n^alpha]` for `0 < alpha <= d`.
pub fn gain_leading(d: usize, alpha: f64, n: u64) -> Result<f64> {
    check_d(d)?;
    check_alpha(alpha)?;
    if n == 0 {
        return Err(OngError::InvalidArgument("n must be at least 1".into()));
    }
    if alpha > d as f64 && !same(alpha, d as f64) {
        return Err(OngError::Regime(format!("the gain expansion holds for alpha <= d; alpha = {alpha}, d = {d}")));
    }
    Ok(gain_leading_coefficient(d, alpha)? * (n as f64).powf(-alpha / d as f64))
}

/// First-order behaviour of `E[O(U_n)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "kebab-case")]
pub enum MeanRegime {
    /// `E[O] ~ constant * n^exponent` with `exponent = 1 - alpha/d`.
    PowerLaw { exponent: f64, constant: f64 },
    /// `alpha == d`: `E[O] ~ coefficient * ln n` with `coefficient = 1/v_d`.
    Logarithmic { coefficient: f64 },
    /// `alpha > d`: `E[O]` converges; the limit is known in closed form only
    /// when `d == 1`.
    Convergent { limit: Option<f64> },
}

/// Upper-bound behaviour of `Var[O(U_n)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "kebab-case")]
pub enum VarianceRegime {
    /// `alpha < d/2`: `Var = O(n^exponent)` with `exponent = 1 - 2 alpha/d`.
    PowerLaw { exponent: f64 },
    /// `alpha == d/2`: `Var = O(ln(1+n))`.
    Logarithmic,
    /// `alpha > d/2`: bounded variance, the centred total converges in L2.
    Bounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictedRegimes {
    pub mean: MeanRegime,
    pub variance: VarianceRegime,
}

pub fn predicted_regimes(d: usize, alpha: f64) -> Result<PredictedRegimes> {
    check_d(d)?;
    check_alpha(alpha)?;
    let df = d as f64;
    let mean = if same(alpha, df) {
        MeanRegime::Logarithmic { coefficient: 1.0 / unit_ball_volume(d)? }
    } else if alpha < df {
        MeanRegime::PowerLaw { exponent: 1.0 - alpha / df, constant: lln_constant(d, alpha)? }
    } else {
        MeanRegime::Convergent { limit: if d == 1 { Some(mu_1d(alpha)?) } else { None } }
    };
    let variance = if same(alpha, df / 2.0) {
        VarianceRegime::Logarithmic
    } else if alpha < df / 2.0 {
        VarianceRegime::PowerLaw { exponent: 1.0 - 2.0 * alpha / df }
    } else {
        VarianceRegime::Bounded
    };
    Ok(PredictedRegimes { mean, variance })
}

/// Every closed-form quantity available at `(d, alpha)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryConstants {
    pub d: usize,
    pub alpha: f64,
    pub unit_ball_volume: f64,
    /// Present when `alpha < d`.
    pub lln_constant: Option<f64>,
    /// Present when `d == 1` and `alpha > 1`.
    pub mu_1d: Option<f64>,
    pub gain_leading_coefficient: f64,
    pub regimes: PredictedRegimes,
}

impl TheoryConstants {
    pub fn new(d: usize, alpha: f64) -> Result<Self> {
        let regimes = predicted_regimes(d, alpha)?;
        Ok(Self {
            d,
            alpha,
            unit_ball_volume: unit_ball_volume(d)?,
            lln_constant: lln_constant(d, alpha).ok(),
            mu_1d: if d == 1 { mu_1d(alpha).ok() } else { None },
            gain_leading_coefficient: gain_leading_coefficient(d, alpha)?,
            regimes,
        })
    }

    /// Predicted variance exponent, `None` in the logarithmic and bounded
    /// regimes.
    pub fn variance_exponent(&self) -> Option<f64> {
        match self.regimes.variance {
            VarianceRegime::PowerLaw { exponent } => Some(exponent),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn gamma_golden_values() {
        // Gamma(k) = (k-1)!, Gamma(k + 1/2) = (2k)! sqrt(pi) / (4^k k!).
        let mut fact = 1.0f64;
        for k in 1..=30u32 {
            assert!(rel(gamma(k as f64), fact) < 1e-12, "Gamma({k})");
            fact *= k as f64;
        }
        let mut half = PI.sqrt();
        for k in 0..30u32 {
            let x = k as f64 + 0.5;
            assert!(rel(gamma(x), half) < 1e-12, "Gamma({x})");
            half *= x;
        }
    }

    #[test]
    fn ball_volumes() {
        assert!(rel(unit_ball_volume(1).unwrap(), 2.0) < 1e-12);
        assert!(rel(unit_ball_volume(2).unwrap(), PI) < 1e-12);
        assert!(rel(unit_ball_volume(3).unwrap(), 4.0 * PI / 3.0) < 1e-12);
        assert!(rel(unit_ball_volume(4).unwrap(), PI * PI / 2.0) < 1e-12);
        assert!(unit_ball_volume(0).is_err());
    }

    #[test]
    fn lln_values() {
        assert!(rel(lln_constant(2, 1.0).unwrap(), 1.0) < 1e-12);
        assert!(rel(lln_constant(1, 0.5).unwrap(), (PI / 2.0).sqrt()) < 1e-12);
        for d in 1..=4 {
            assert!(rel(lln_constant(d, 1e-9).unwrap(), 1.0) < 1e-6);
        }
        assert!(matches!(lln_constant(2, 2.0), Err(OngError::Regime(_))));
        assert!(matches!(lln_constant(1, 3.0), Err(OngError::Regime(_))));
        assert!(lln_constant(1, 0.0).is_err());
    }

    #[test]
    fn lln_blows_up_near_alpha_equal_d() {
        for d in 1..=3 {
            let df = d as f64;
            let vals: Vec<f64> =
                [0.9, 0.99, 0.999, 0.9999].iter().map(|f| lln_constant(d, f * df).unwrap()).collect();
            assert!(vals.windows(2).all(|w| w[1] > w[0]));
            assert!(vals[3] > 1000.0);
        }
    }

    #[test]
    fn mu_1d_values() {
        assert!(rel(mu_1d(2.0).unwrap(), 5.0 / 12.0) < 1e-14);
        assert!(rel(mu_1d(3.0).unwrap(), 17.0 / 96.0) < 1e-14);
        assert!(mu_1d(200.0).unwrap() < 1e-4);
        assert!(matches!(mu_1d(1.0), Err(OngError::Regime(_))));
        assert!(matches!(mu_1d(0.5), Err(OngError::Regime(_))));
    }

    #[test]
    fn gain_leading_values() {
        assert!(rel(gain_leading(1, 1.0, 100).unwrap(), 0.005) < 1e-12);
        assert!(rel(gain_leading(2, 2.0, 100).unwrap(), 1.0 / (PI * 100.0)) < 1e-12);
        for (d, a) in [(1, 0.5), (2, 1.5), (3, 3.0)] {
            let df = d as f64;
            let expect = unit_ball_volume(d).unwrap().powf(-a / df) * gamma(1.0 + a / df);
            assert!(rel(gain_leading(d, a, 1).unwrap(), expect) < 1e-14);
        }
        assert!(matches!(gain_leading(1, 1.5, 10), Err(OngError::Regime(_))));
    }

    #[test]
    fn regimes() {
        let r = predicted_regimes(2, 0.5).unwrap();
        assert_eq!(r.variance, VarianceRegime::PowerLaw { exponent: 0.5 });
        assert!(matches!(r.mean, MeanRegime::PowerLaw { .. }));
        assert_eq!(predicted_regimes(2, 1.0).unwrap().variance, VarianceRegime::Logarithmic);
        assert_eq!(predicted_regimes(1, 0.75).unwrap().variance, VarianceRegime::Bounded);
        assert!(matches!(predicted_regimes(1, 1.0).unwrap().mean, MeanRegime::Logarithmic { coefficient } if rel(coefficient, 0.5) < 1e-12));
        assert_eq!(
            predicted_regimes(1, 2.0).unwrap().mean,
            MeanRegime::Convergent { limit: Some(mu_1d(2.0).unwrap()) }
        );
        assert_eq!(predicted_regimes(2, 3.0).unwrap().mean, MeanRegime::Convergent { limit: None });
    }

    #[test]
    fn constants_record() {
        let c = TheoryConstants::new(1, 2.0).unwrap();
        assert!(rel(c.unit_ball_volume, 2.0) < 1e-12);
        assert!(rel(c.mu_1d.unwrap(), 0.416_666_666_666_666_7) < 1e-12);
        assert_eq!(c.lln_constant, None);
        assert_eq!(c.variance_exponent(), None);
        let c = TheoryConstants::new(2, 0.5).unwrap();
        assert_eq!(c.variance_exponent(), Some(0.5));
        assert!(c.lln_constant.unwrap() > 0.0);
    }
}
