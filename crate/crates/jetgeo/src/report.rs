//! Report types shared by every verification suite, plus the equation-tag
//! registry used for coverage reporting.
//!
//! Checks carry a stable `equation` tag (e.g. `"eq20"`) naming the identity
//! of contact Riemannian geometry they verify; the report-matrix command
//! aggregates residuals per tag across models. Tags are labels of this
//! artifact's schema, numbered to match the usual presentation of the
//! identity suite it implements.

use serde::{Deserialize, Serialize};

/// Residual statistics over sample points. Pass/fail decisions use the max;
/// the mean is reported for context.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualStats {
    pub max: f64,
    pub mean: f64,
    pub count: usize,
}

impl ResidualStats {
    pub fn from_values(values: &[f64]) -> ResidualStats {
        if values.is_empty() {
            return ResidualStats {
                max: 0.0,
                mean: 0.0,
                count: 0,
            };
        }
        let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mean = values.iter().map(|v| v.abs()).sum::<f64>() / values.len() as f64;
        ResidualStats {
            max,
            mean,
            count: values.len(),
        }
    }

    pub fn merged(stats: impl IntoIterator<Item = ResidualStats>) -> ResidualStats {
        let mut max = 0.0f64;
        let mut sum = 0.0;
        let mut count = 0usize;
        for s in stats {
            max = max.max(s.max);
            sum += s.mean * s.count as f64;
            count += s.count;
        }
        ResidualStats {
            max,
            mean: if count == 0 { 0.0 } else { sum / count as f64 },
            count,
        }
    }
}

/// Outcome of one named check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

/// One verified identity (or detection) with its residuals and threshold.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    /// Stable equation tag for coverage aggregation, when the check verifies
    /// a tagged identity.
    pub equation: Option<String>,
    pub max_residual: Option<f64>,
    pub mean_residual: Option<f64>,
    pub threshold: Option<f64>,
    /// Sample points that entered the residual statistics.
    pub points: usize,
    pub status: CheckStatus,
    pub note: Option<String>,
}

impl CheckRecord {
    pub fn from_stats(
        name: impl Into<String>,
        equation: Option<&str>,
        stats: ResidualStats,
        threshold: f64,
    ) -> CheckRecord {
        CheckRecord {
            name: name.into(),
            equation: equation.map(str::to_owned),
            max_residual: Some(stats.max),
            mean_residual: Some(stats.mean),
            threshold: Some(threshold),
            points: stats.count,
            status: if stats.max < threshold {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            note: None,
        }
    }

    /// Check on a single scalar deviation (|measured - expected|).
    pub fn from_deviation(
        name: impl Into<String>,
        equation: Option<&str>,
        deviation: f64,
        threshold: f64,
    ) -> CheckRecord {
        CheckRecord::from_stats(
            name,
            equation,
            ResidualStats {
                max: deviation.abs(),
                mean: deviation.abs(),
                count: 1,
            },
            threshold,
        )
    }

    /// A detection check: passes when a mutated input *exceeds* the floor.
    pub fn detection(
        name: impl Into<String>,
        equation: Option<&str>,
        observed: f64,
        floor: f64,
    ) -> CheckRecord {
        CheckRecord {
            name: name.into(),
            equation: equation.map(str::to_owned),
            max_residual: Some(observed),
            mean_residual: None,
            threshold: Some(floor),
            points: 1,
            status: if observed > floor {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            note: Some("passes when the residual exceeds the floor".into()),
        }
    }

    pub fn not_applicable(
        name: impl Into<String>,
        equation: Option<&str>,
        reason: impl Into<String>,
    ) -> CheckRecord {
        CheckRecord {
            name: name.into(),
            equation: equation.map(str::to_owned),
            max_residual: None,
            mean_residual: None,
            threshold: None,
            points: 0,
            status: CheckStatus::NotApplicable,
            note: Some(reason.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> CheckRecord {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

/// A fitted constant (lambda, alpha, beta, c, W, ...) with its across-point
/// spread (max deviation from the mean).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FittedConstant {
    pub name: String,
    pub value: f64,
    pub spread: f64,
}

impl FittedConstant {
    pub fn from_samples(name: impl Into<String>, samples: &[f64]) -> FittedConstant {
        let mean = samples.iter().sum::<f64>() / samples.len().max(1) as f64;
        let spread = samples
            .iter()
            .fold(0.0f64, |m, v| m.max((v - mean).abs()));
        FittedConstant {
            name: name.into(),
            value: mean,
            spread,
        }
    }
}

/// Result of one suite on one model: named checks plus fitted constants.
/// Overall pass is the conjunction of the applicable checks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckRecord>,
    pub constants: Vec<FittedConstant>,
    pub overall_pass: bool,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>) -> SuiteReport {
        SuiteReport {
            suite: suite.into(),
            checks: Vec::new(),
            constants: Vec::new(),
            overall_pass: true,
        }
    }

    pub fn push(&mut self, check: CheckRecord) {
        if check.status == CheckStatus::Fail {
            self.overall_pass = false;
        }
        self.checks.push(check);
    }

    pub fn push_constant(&mut self, c: FittedConstant) {
        self.constants.push(c);
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn constant(&self, name: &str) -> Option<&FittedConstant> {
        self.constants.iter().find(|c| c.name == name)
    }
}

/// Scales pinned per-check thresholds by the user tolerance relative to the
/// default base tolerance of 1e-7, so `--tolerance` tightens or loosens the
/// whole suite proportionally.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    pub base: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { base: 1e-7 }
    }
}

impl Tolerances {
    pub fn new(base: f64) -> Tolerances {
        Tolerances { base }
    }

    /// Threshold for a check whose pinned default is `default_threshold`.
    pub fn at(&self, default_threshold: f64) -> f64 {
        default_threshold * (self.base / 1e-7)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_from_values() {
        let s = ResidualStats::from_values(&[1.0, -3.0, 2.0]);
        assert_eq!(s.max, 3.0);
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.count, 3);
    }

    #[test]
    fn overall_pass_ignores_not_applicable() {
        let mut rep = SuiteReport::new("demo");
        rep.push(CheckRecord::from_deviation("a", None, 1e-9, 1e-7));
        rep.push(CheckRecord::not_applicable("b", None, "precondition unmet"));
        assert!(rep.overall_pass);
        rep.push(CheckRecord::from_deviation("c", None, 1.0, 1e-7));
        assert!(!rep.overall_pass);
    }

    #[test]
    fn tolerance_scaling_is_proportional() {
        let t = Tolerances::new(1e-9);
        assert!((t.at(1e-8) - 1e-10).abs() < 1e-24);
        let d = Tolerances::default();
        assert_eq!(d.at(1e-8), 1e-8);
    }

    #[test]
    fn fitted_constant_spread() {
        let c = FittedConstant::from_samples("lambda", &[6.0, 6.0 + 1e-12, 6.0 - 1e-12]);
        assert!((c.value - 6.0).abs() < 1e-12);
        assert!(c.spread <= 2e-12);
    }
}
