//! Machine-readable verification reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// Every tolerance used by the suites. All are multiplied by `scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Tolerances {
    /// Error-bar multiplier for bound checks (default 3).
    pub sigma: f64,
    /// Relative floor covering rounding in exact paths (default 1e-9).
    pub rel_floor: f64,
    /// Global multiplier, the CLI's `--tol-scale` (default 1).
    pub scale: f64,
    /// Closed-form constants and analytic equalities (1e-9).
    pub exact_rel: f64,
    /// Ball-volume recurrence against log-gamma (1e-12).
    pub recurrence_rel: f64,
    /// Vanishing odd multipliers (1e-10).
    pub odd_multiplier: f64,
    /// Floor that even multipliers must exceed (1e-6).
    pub even_multiplier_floor: f64,
    /// Lebesgue inputs against the bound they attain, and unit-ball volumes (0.01).
    pub lebesgue_rel: f64,
    /// Chain agreement `|A − B|/A` (0.02).
    pub chain_rel: f64,
    /// Distance of the asymptotic ratios from 1 at `nmax` (0.05).
    pub asymptotic: f64,
    /// Ball equalities through the 1-D multiplier route (1e-4).
    pub ball_rel: f64,
    /// `ΠB = ΨB` support residual (1e-8).
    pub ball_support: f64,
    /// Projection identity on the ball (1e-6).
    pub identity: f64,
    /// Isotropy defect after positioning (1e-6).
    pub position_defect: f64,
    /// Iteration cap for positioning the sheared cube (200).
    pub position_iterations: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            sigma: 3.0,
            rel_floor: 1e-9,
            scale: 1.0,
            exact_rel: 1e-9,
            recurrence_rel: 1e-12,
            odd_multiplier: 1e-10,
            even_multiplier_floor: 1e-6,
            lebesgue_rel: 0.01,
            chain_rel: 0.02,
            asymptotic: 0.05,
            ball_rel: 1e-4,
            ball_support: 1e-8,
            identity: 1e-6,
            position_defect: 1e-6,
            position_iterations: 200,
        }
    }
}

impl Tolerances {
    /// `scale·(sigma·error + rel_floor·|bound|)`.
    pub fn slack(&self, error: f64, bound: f64) -> f64 {
        self.scale * (self.sigma * error + self.rel_floor * bound.abs())
    }

    /// A fixed tolerance times `scale`.
    pub fn scaled(&self, tol: f64) -> f64 {
        self.scale * tol
    }
}

/// JSON has no NaN or infinities; they serialize as `null` and read back as NaN.
fn null_as_nan<'de, D: serde::Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

/// One verified quantity. Missing bounds mean unbounded on that side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Check {
    pub name: String,
    #[serde(deserialize_with = "null_as_nan")]
    pub computed_value: f64,
    pub lower_bound: Option<f64>,
    pub upper_bound: Option<f64>,
    #[serde(deserialize_with = "null_as_nan")]
    pub error_bar: f64,
    pub pass: bool,
    pub note: String,
}

impl Check {
    /// Passes when `lower − slack <= value <= upper + slack`.
    pub fn within(
        name: impl Into<String>,
        value: f64,
        error_bar: f64,
        lower: Option<f64>,
        upper: Option<f64>,
        slack: f64,
        note: impl Into<String>,
    ) -> Check {
        let lo_ok = lower.is_none_or(|l| value >= l - slack);
        let hi_ok = upper.is_none_or(|u| value <= u + slack);
        Check {
            name: name.into(),
            computed_value: value,
            lower_bound: lower,
            upper_bound: upper,
            error_bar,
            pass: value.is_finite() && lo_ok && hi_ok,
            note: note.into(),
        }
    }

    /// Passes when `|value − target| <= tol`.
    pub fn near(
        name: impl Into<String>,
        value: f64,
        target: f64,
        tol: f64,
        error_bar: f64,
        note: impl Into<String>,
    ) -> Check {
        Check::within(name, value, error_bar, Some(target - tol), Some(target + tol), 0.0, note)
    }

    /// A boolean outcome, recorded as value 1 or 0 against bounds `[1, 1]`.
    pub fn flag(name: impl Into<String>, ok: bool, note: impl Into<String>) -> Check {
        let v = if ok { 1.0 } else { 0.0 };
        Check::within(name, v, 0.0, Some(1.0), Some(1.0), 0.0, note)
    }

    /// A reported value that is never asserted.
    pub fn info(name: impl Into<String>, value: f64, error_bar: f64, note: impl Into<String>) -> Check {
        Check::within(name, value, error_bar, None, None, 0.0, note).with_pass(true)
    }

    fn with_pass(mut self, pass: bool) -> Check {
        self.pass = pass;
        self
    }

    /// Prefix the name, for nesting per-body checks inside a suite.
    pub fn prefixed(mut self, prefix: &str) -> Check {
        self.name = format!("{prefix}/{}", self.name);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerificationReport {
    pub schema_version: u32,
    pub suite_name: String,
    pub pass: bool,
    pub config: BTreeMap<String, serde_json::Value>,
    pub checks: Vec<Check>,
    pub tables: BTreeMap<String, serde_json::Value>,
    pub timing: Timing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Timing {
    pub elapsed_ms: u64,
}

impl VerificationReport {
    pub fn new(suite: &str) -> VerificationReport {
        VerificationReport {
            schema_version: SCHEMA_VERSION,
            suite_name: suite.to_string(),
            pass: true,
            config: BTreeMap::new(),
            checks: Vec::new(),
            tables: BTreeMap::new(),
            timing: Timing { elapsed_ms: 0 },
        }
    }

    pub fn set_config(&mut self, key: &str, value: impl Serialize) {
        self.config.insert(key.to_string(), serde_json::to_value(value).unwrap_or(serde_json::Value::Null));
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    pub fn add_table(&mut self, key: &str, value: impl Serialize) {
        self.tables.insert(key.to_string(), serde_json::to_value(value).unwrap_or(serde_json::Value::Null));
    }

    /// Merge another report's checks (prefixed by its suite name) and tables.
    pub fn absorb(&mut self, other: VerificationReport) {
        let prefix = other.suite_name.clone();
        self.checks.extend(other.checks.into_iter().map(|c| c.prefixed(&prefix)));
        for (k, v) in other.tables {
            self.tables.insert(format!("{prefix}/{k}"), v);
        }
    }

    /// Sort checks by name and set the global pass flag.
    pub fn finish(&mut self, elapsed_ms: u64) {
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
        self.pass = self.checks.iter().all(|c| c.pass);
        self.timing.elapsed_ms = elapsed_ms;
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The JSON text with the timing field removed, for determinism checks.
    pub fn to_json_without_timing(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timing");
        }
        serde_json::to_string_pretty(&v).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks_and_ordering() {
        let mut r = VerificationReport::new("demo");
        r.push(Check::within("b", 1.0, 0.0, Some(0.0), None, 0.0, ""));
        r.push(Check::near("a", 1.0, 1.1, 0.05, 0.0, ""));
        r.push(Check::info("c", f64::NAN, 0.0, "reported"));
        r.finish(5);
        assert_eq!(r.checks.iter().map(|c| c.name.as_str()).collect::<Vec<_>>(), ["a", "b", "c"]);
        assert!(!r.pass);
        assert_eq!(r.failures().count(), 1);
        let json = r.to_json();
        assert!(json.contains("\"schemaVersion\": 1"));
        assert!(json.contains("\"upperBound\": null"));
        let back: VerificationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.checks[1], r.checks[1]);
        assert!(!r.to_json_without_timing().contains("elapsed"));
    }

    #[test]
    fn slack_widens_bounds() {
        assert!(Check::within("x", 1.05, 0.0, None, Some(1.0), 0.1, "").pass);
        assert!(!Check::within("x", 1.2, 0.0, None, Some(1.0), 0.1, "").pass);
        assert!(!Check::within("x", f64::INFINITY, 0.0, None, None, 0.0, "").pass);
    }
}
