//! Machine-readable verification reports.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::formfile::to_json_17;

/// One named check: pass iff max_residual <= tolerance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// A suite run: named checks, the seed they ran under, and wall time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<Check>,
    pub seed: u64,
    pub runtime_ms: u128,
    /// Structured reason when the suite aborted on a precondition.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl Report {
    pub fn new(suite: impl Into<String>, seed: u64) -> Self {
        Self { suite: suite.into(), checks: Vec::new(), seed, runtime_ms: 0, reason: None }
    }

    pub fn push(&mut self, name: impl Into<String>, max_residual: f64, tolerance: f64) {
        self.checks.push(Check {
            name: name.into(),
            max_residual,
            tolerance,
            pass: max_residual <= tolerance,
        });
    }

    /// A yes/no condition recorded as residual 0 or 1 against tolerance 0.5.
    pub fn push_flag(&mut self, name: impl Into<String>, ok: bool) {
        self.push(name, if ok { 0.0 } else { 1.0 }, 0.5);
    }

    pub fn all_pass(&self) -> bool {
        self.reason.is_none() && self.checks.iter().all(|c| c.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let bytes = to_json_17(self)?;
        Ok(String::from_utf8_lossy(&bytes).into_owned())
    }

    /// The report with timing removed, for determinism comparisons.
    pub fn without_runtime(&self) -> Report {
        let mut r = self.clone();
        r.runtime_ms = 0;
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_iff_residual_within_tolerance() {
        let mut report = Report::new("demo", 1);
        report.push("ok", 1e-12, 1e-9);
        report.push("bad", 1e-3, 1e-9);
        assert!(report.checks[0].pass);
        assert!(!report.checks[1].pass);
        assert!(!report.all_pass());
        assert_eq!(report.exit_code(), 1);
    }

    #[test]
    fn json_round_trip() {
        let mut report = Report::new("demo", 42);
        report.push("x", 0.25, 0.5);
        let json = report.to_json().unwrap();
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back.suite, "demo");
        assert_eq!(back.seed, 42);
        assert_eq!(back.checks[0].max_residual, 0.25);
    }
}
