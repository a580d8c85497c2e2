//! Experiment configuration: one JSON document per run.
//!
//! Every field must be present except `threads`, which defaults to the
//! available parallelism. Experiment-specific settings live in `params`,
//! whose shape depends on `experiment`; use `{}` where there are none.

use std::fmt;
use std::path::{Path, PathBuf};

use ong_core::theory::{predicted_regimes, MeanRegime};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::gates::Gate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Lln,
    MeanGain,
    LogRegime,
    MuLimit,
    VarianceScan,
    CauchyTail,
    ResampleCheck,
    VoronoiScan,
    OracleCheck,
    Constants,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 10] = [
        ExperimentKind::Lln,
        ExperimentKind::MeanGain,
        ExperimentKind::LogRegime,
        ExperimentKind::MuLimit,
        ExperimentKind::VarianceScan,
        ExperimentKind::CauchyTail,
        ExperimentKind::ResampleCheck,
        ExperimentKind::VoronoiScan,
        ExperimentKind::OracleCheck,
        ExperimentKind::Constants,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Lln => "lln",
            ExperimentKind::MeanGain => "mean-gain",
            ExperimentKind::LogRegime => "log-regime",
            ExperimentKind::MuLimit => "mu-limit",
            ExperimentKind::VarianceScan => "variance-scan",
            ExperimentKind::CauchyTail => "cauchy-tail",
            ExperimentKind::ResampleCheck => "resample-check",
            ExperimentKind::VoronoiScan => "voronoi-scan",
            ExperimentKind::OracleCheck => "oracle-check",
            ExperimentKind::Constants => "constants",
        }
    }

    /// First label of every seed path. Fixed forever: changing one breaks
    /// replay of recorded manifests.
    pub fn stream_id(self) -> u64 {
        match self {
            ExperimentKind::Lln => 0x11,
            ExperimentKind::MeanGain => 0x12,
            ExperimentKind::LogRegime => 0x13,
            ExperimentKind::MuLimit => 0x14,
            ExperimentKind::VarianceScan => 0x15,
            ExperimentKind::CauchyTail => 0x16,
            ExperimentKind::ResampleCheck => 0x17,
            ExperimentKind::VoronoiScan => 0x18,
            ExperimentKind::OracleCheck => 0x19,
            ExperimentKind::Constants => 0x1A,
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    /// Write one edge-list CSV per replicate for experiments that build
    /// full graphs.
    pub dump_edges: bool,
    /// Verify every grid query against the brute-force oracle.
    pub shadow_oracle: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoParams {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CauchyTailParams {
    /// Each `m` in `ns` is paired with `ratio * m`.
    pub ratio: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResampleCheckParams {
    /// Re-sampled indices `i`; pairs with `i > n` are skipped.
    pub indices: Vec<usize>,
    /// Inner re-draws per outer replicate; `replicates` is the outer count.
    pub inner_reps: usize,
    /// Also estimate the six components separately (three builds per draw).
    pub components: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VoronoiScanParams {
    /// Cell centres, each of dimension `d`.
    pub points: Vec<Vec<f64>>,
    /// Rays per sampled diameter; ignored in one dimension.
    pub rays: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleCheckParams {
    /// Instance sizes are drawn uniformly from `1..=max_n`; `replicates` is
    /// the number of instances.
    pub max_n: usize,
}

/// Typed `params`, selected by the experiment kind.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Params {
    None(NoParams),
    CauchyTail(CauchyTailParams),
    ResampleCheck(ResampleCheckParams),
    VoronoiScan(VoronoiScanParams),
    OracleCheck(OracleCheckParams),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub d: usize,
    pub alphas: Vec<f64>,
    pub ns: Vec<usize>,
    pub lambdas: Vec<f64>,
    pub replicates: usize,
    pub master_seed: u64,
    pub threads: Option<usize>,
    pub output_dir: PathBuf,
    pub flags: Flags,
    pub params: Params,
    pub gates: Vec<Gate>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: ExperimentKind,
    d: usize,
    alphas: Vec<f64>,
    ns: Vec<usize>,
    lambdas: Vec<f64>,
    replicates: usize,
    master_seed: u64,
    #[serde(default)]
    threads: Option<usize>,
    output_dir: PathBuf,
    flags: Flags,
    params: serde_json::Value,
    gates: Vec<Gate>,
}

fn parse_params<T: serde::de::DeserializeOwned>(kind: ExperimentKind, v: serde_json::Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| LabError::invalid(format!("params for {kind}: {e}")))
}

impl ExperimentConfig {
    /// Parses and validates a JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| LabError::invalid(e.to_string()))?;
        let kind = raw.experiment;
        let params = match kind {
            ExperimentKind::CauchyTail => Params::CauchyTail(parse_params(kind, raw.params)?),
            ExperimentKind::ResampleCheck => Params::ResampleCheck(parse_params(kind, raw.params)?),
            ExperimentKind::VoronoiScan => Params::VoronoiScan(parse_params(kind, raw.params)?),
            ExperimentKind::OracleCheck => Params::OracleCheck(parse_params(kind, raw.params)?),
            _ => Params::None(parse_params(kind, raw.params)?),
        };
        let cfg = ExperimentConfig {
            experiment: kind,
            d: raw.d,
            alphas: raw.alphas,
            ns: raw.ns,
            lambdas: raw.lambdas,
            replicates: raw.replicates,
            master_seed: raw.master_seed,
            threads: raw.threads,
            output_dir: raw.output_dir,
            flags: raw.flags,
            params,
            gates: raw.gates,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Worker threads: the configured count or the available parallelism.
    pub fn effective_threads(&self) -> usize {
        self.threads.unwrap_or_else(host_threads)
    }

    pub fn cauchy_tail(&self) -> &CauchyTailParams {
        match &self.params {
            Params::CauchyTail(p) => p,
            _ => unreachable!("validated config"),
        }
    }

    pub fn resample_check(&self) -> &ResampleCheckParams {
        match &self.params {
            Params::ResampleCheck(p) => p,
            _ => unreachable!("validated config"),
        }
    }

    pub fn voronoi_scan(&self) -> &VoronoiScanParams {
        match &self.params {
            Params::VoronoiScan(p) => p,
            _ => unreachable!("validated config"),
        }
    }

    pub fn oracle_check(&self) -> &OracleCheckParams {
        match &self.params {
            Params::OracleCheck(p) => p,
            _ => unreachable!("validated config"),
        }
    }

    /// Checks ranges and regime compatibility.
    pub fn validate(&self) -> Result<()> {
        use ExperimentKind as K;
        let kind = self.experiment;
        let fail = |m: String| Err(LabError::invalid(format!("{kind}: {m}")));
        let d = self.d;
        let df = d as f64;

        if d == 0 {
            return fail("d must be at least 1".into());
        }
        if let Some(a) = self.alphas.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
            return fail(format!("alpha {a} must be positive and finite"));
        }
        if self.ns.contains(&0) {
            return fail("every n must be at least 1".into());
        }
        if let Some(l) = self.lambdas.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return fail(format!("lambda {l} must be positive and finite"));
        }
        if self.replicates == 0 {
            return fail("replicates must be at least 1".into());
        }
        if self.threads == Some(0) {
            return fail("threads must be at least 1".into());
        }
        for g in &self.gates {
            g.validate().map_err(|m| LabError::invalid(format!("{kind}: gate {}: {m}", g.name)))?;
        }
        let has_dupes = |v: &[usize]| {
            let mut s = v.to_vec();
            s.sort_unstable();
            s.windows(2).any(|w| w[0] == w[1])
        };
        if has_dupes(&self.ns) {
            return fail("n values must be distinct".into());
        }

        let needs = |what: &str, ok: bool| if ok { Ok(()) } else { fail(format!("{what} must not be empty")) };
        match kind {
            K::Constants | K::VoronoiScan | K::OracleCheck => {}
            _ => needs("alphas", !self.alphas.is_empty())?,
        }
        match kind {
            K::Constants | K::OracleCheck => {}
            K::MuLimit => needs("ns or lambdas", !(self.ns.is_empty() && self.lambdas.is_empty()))?,
            _ => needs("ns", !self.ns.is_empty())?,
        }
        if kind == K::Constants {
            needs("alphas", !self.alphas.is_empty())?;
        }
        if !self.lambdas.is_empty() && kind != K::MuLimit {
            return fail("lambdas are only used by mu-limit".into());
        }

        for &a in &self.alphas {
            let regimes = predicted_regimes(d, a)?;
            match kind {
                K::Lln if !matches!(regimes.mean, MeanRegime::PowerLaw { .. }) => {
                    return fail(format!("the law-of-large-numbers constant needs alpha < d, got alpha = {a}, d = {d}"));
                }
                K::MeanGain if a > df => {
                    return fail(format!("the gain expansion needs alpha <= d, got alpha = {a}, d = {d}"));
                }
                K::LogRegime if !matches!(regimes.mean, MeanRegime::Logarithmic { .. }) => {
                    return fail(format!("the logarithmic regime needs alpha = d, got alpha = {a}, d = {d}"));
                }
                K::MuLimit if !matches!(regimes.mean, MeanRegime::Convergent { .. }) => {
                    return fail(format!("the limit mean needs alpha > d, got alpha = {a}, d = {d}"));
                }
                K::CauchyTail if a <= df / 2.0 => {
                    return fail(format!("L2 convergence needs alpha > d/2, got alpha = {a}, d = {d}"));
                }
                _ => {}
            }
        }

        match kind {
            K::MeanGain if self.ns.iter().any(|&n| n < 2) => fail("mean-gain needs n >= 2".into()),
            K::LogRegime | K::VarianceScan | K::CauchyTail if self.replicates < 2 => {
                fail("at least 2 replicates are needed for a variance".into())
            }
            K::CauchyTail if self.cauchy_tail().ratio < 2 => fail("ratio must be at least 2".into()),
            K::ResampleCheck => {
                let p = self.resample_check();
                if p.indices.is_empty() || p.indices.contains(&0) {
                    return fail("indices must be non-empty and at least 1".into());
                }
                if p.inner_reps < 2 || self.replicates < 2 {
                    return fail("inner_reps and replicates must be at least 2".into());
                }
                if !self.ns.iter().any(|&n| p.indices.iter().any(|&i| i <= n)) {
                    return fail("no index i satisfies i <= n".into());
                }
                Ok(())
            }
            K::VoronoiScan => {
                let p = self.voronoi_scan();
                if p.points.is_empty() {
                    return fail("points must not be empty".into());
                }
                if let Some(x) = p.points.iter().find(|x| x.len() != d || x.iter().any(|c| !(*c > 0.0 && *c < 1.0))) {
                    return fail(format!("point {x:?} must have {d} coordinates in (0,1)"));
                }
                if d >= 2 && p.rays < 2 {
                    return fail("rays must be at least 2".into());
                }
                Ok(())
            }
            K::OracleCheck if self.oracle_check().max_n == 0 => fail("max_n must be at least 1".into()),
            _ => Ok(()),
        }
    }
}

pub fn host_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(kind: &str, extra: &str) -> String {
        format!(
            r#"{{"experiment": "{kind}", "d": 2, "alphas": [1.0], "ns": [100, 200], "lambdas": [],
                "replicates": 4, "master_seed": 7, "output_dir": "out",
                "flags": {{"dump_edges": false, "shadow_oracle": false}},
                "params": {extra}, "gates": []}}"#
        )
    }

    #[test]
    fn parses_a_minimal_config() {
        let c = ExperimentConfig::from_json(&base("lln", "{}")).unwrap();
        assert_eq!(c.experiment, ExperimentKind::Lln);
        assert_eq!(c.threads, None);
        assert!(c.effective_threads() >= 1);
        let again = ExperimentConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn missing_fields_are_rejected() {
        let text = base("lln", "{}").replace(r#""lambdas": [],"#, "");
        assert!(matches!(ExperimentConfig::from_json(&text), Err(LabError::InvalidConfig(_))));
        let text = base("lln", "{}").replace(r#""replicates": 4,"#, r#""replicates": 4, "extra": 1,"#);
        assert!(ExperimentConfig::from_json(&text).is_err());
    }

    #[test]
    fn params_follow_the_experiment() {
        assert!(ExperimentConfig::from_json(&base("cauchy-tail", "{}")).is_err());
        let c = ExperimentConfig::from_json(&base("voronoi-scan", r#"{"points": [[0.5, 0.5]], "rays": 16}"#)).unwrap();
        assert_eq!(c.voronoi_scan().rays, 16);
        assert!(ExperimentConfig::from_json(&base("lln", r#"{"ratio": 2}"#)).is_err());
    }

    #[test]
    fn regime_compatibility() {
        assert!(ExperimentConfig::from_json(&base("mu-limit", "{}")).is_err());
        assert!(ExperimentConfig::from_json(&base("log-regime", "{}")).is_err());
        let t = base("log-regime", "{}").replace(r#""alphas": [1.0]"#, r#""alphas": [2.0]"#);
        assert!(ExperimentConfig::from_json(&t).is_ok());
        let t = base("lln", "{}").replace(r#""alphas": [1.0]"#, r#""alphas": [2.0]"#);
        assert!(ExperimentConfig::from_json(&t).is_err());
    }

    #[test]
    fn range_checks() {
        for (from, to) in [
            (r#""d": 2"#, r#""d": 0"#),
            (r#""alphas": [1.0]"#, r#""alphas": [-1.0]"#),
            (r#""ns": [100, 200]"#, r#""ns": [0]"#),
            (r#""ns": [100, 200]"#, r#""ns": [100, 100]"#),
            (r#""replicates": 4"#, r#""replicates": 0"#),
        ] {
            let t = base("lln", "{}").replace(from, to);
            assert!(ExperimentConfig::from_json(&t).is_err(), "{to}");
        }
    }
}
