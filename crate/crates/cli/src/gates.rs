//! Tolerance gates: data describing which statistic to check and how.

use serde::{Deserialize, Serialize};

use crate::report::Statistic;

/// Picks statistics by name and, optionally, by parameter values.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Selector {
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub index: Option<usize>,
    #[serde(default)]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Check {
    /// `|value / target - 1| <= tolerance`.
    Relative { target: f64, tolerance: f64 },
    /// `|value - target| <= tolerance`.
    Absolute { target: f64, tolerance: f64 },
    AtMost { limit: f64 },
    AtLeast { limit: f64 },
}

impl Check {
    pub fn passes(&self, v: f64) -> bool {
        if !v.is_finite() {
            return false;
        }
        match *self {
            Check::Relative { target, tolerance } => (v / target - 1.0).abs() <= tolerance,
            Check::Absolute { target, tolerance } => (v - target).abs() <= tolerance,
            Check::AtMost { limit } => v <= limit,
            Check::AtLeast { limit } => v >= limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gate {
    pub name: String,
    pub statistic: String,
    pub select: Selector,
    pub check: Check,
}

impl Gate {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.statistic.is_empty() {
            return Err("statistic must be named".into());
        }
        match self.check {
            Check::Relative { target, tolerance } if target == 0.0 || (tolerance.is_nan() || tolerance < 0.0) => {
                Err("relative checks need a non-zero target and a non-negative tolerance".into())
            }
            Check::Absolute { tolerance, .. } if (tolerance.is_nan() || tolerance < 0.0) => Err("tolerance must be non-negative".into()),
            _ => Ok(()),
        }
    }

    fn selects(&self, s: &Statistic) -> bool {
        let sel = &self.select;
        s.statistic == self.statistic
            && sel.alpha.is_none_or(|a| s.alpha == Some(a))
            && sel.n.is_none_or(|n| s.n == Some(n))
            && sel.lambda.is_none_or(|l| s.lambda == Some(l))
            && sel.index.is_none_or(|i| s.index == Some(i))
            && sel.label.as_ref().is_none_or(|l| s.label.as_ref() == Some(l))
    }

    /// Applies the check to every selected statistic; a gate that selects
    /// nothing fails.
    pub fn evaluate(&self, stats: &[Statistic]) -> GateOutcome {
        let observed: Vec<f64> = stats.iter().filter(|s| self.selects(s)).map(|s| s.value).collect();
        let passed = !observed.is_empty() && observed.iter().all(|&v| self.check.passes(v));
        GateOutcome { name: self.name.clone(), statistic: self.statistic.clone(), check: self.check.clone(), observed, passed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateOutcome {
    pub name: String,
    pub statistic: String,
    pub check: Check,
    pub observed: Vec<f64>,
    pub passed: bool,
}
