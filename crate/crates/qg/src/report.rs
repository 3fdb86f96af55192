//! Structured verification reports: per-identity residuals, tolerances and
//! pass/fail, serializable to JSON.

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// One named identity check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckCase {
    pub name: String,
    /// Which structural identity this case exercises, e.g. "pentagon-W" or
    /// "mixed-relation-right"; empty only for plumbing checks.
    pub anchor: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Result of an identity suite.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub suite: String,
    pub group: String,
    pub seed: u64,
    pub timing_ms: u128,
    pub cases: Vec<CheckCase>,
    /// Free-form notes, e.g. which printed closed form an orientation check
    /// selected.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl VerifyReport {
    pub fn new(suite: impl Into<String>, group: impl Into<String>, seed: u64) -> Self {
        VerifyReport {
            schema_version: SCHEMA_VERSION,
            suite: suite.into(),
            group: group.into(),
            seed,
            timing_ms: 0,
            cases: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, anchor: impl Into<String>, residual: f64, tolerance: f64) {
        self.cases.push(CheckCase {
            name: name.into(),
            anchor: anchor.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
        });
    }

    /// Records a boolean check as a 0/1 residual against tolerance 0.5.
    pub fn push_bool(&mut self, name: impl Into<String>, anchor: impl Into<String>, ok: bool) {
        self.push(name, anchor, if ok { 0.0 } else { 1.0 }, 0.5);
    }

    pub fn all_pass(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.cases.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn merge(&mut self, other: VerifyReport) {
        self.cases.extend(other.cases);
        self.notes.extend(other.notes);
    }

    /// Human-readable table, one line per case.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let width = self.cases.iter().map(|c| c.name.len()).max().unwrap_or(4).max(4);
        out.push_str(&format!(
            "suite={} group={} seed={} ({} cases)\n",
            self.suite,
            self.group,
            self.seed,
            self.cases.len()
        ));
        for c in &self.cases {
            out.push_str(&format!(
                "  {:width$}  {}  residual={:<12.3e} tol={:.1e}  [{}]\n",
                c.name,
                if c.pass { "PASS" } else { "FAIL" },
                c.residual,
                c.tolerance,
                c.anchor,
                width = width
            ));
        }
        for n in &self.notes {
            out.push_str(&format!("  note: {n}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_iff_residual_within_tolerance() {
        let mut r = VerifyReport::new("t", "Z2", 7);
        r.push("a", "x", 1e-12, 1e-10);
        r.push("b", "y", 1e-6, 1e-10);
        assert!(r.cases[0].pass);
        assert!(!r.cases[1].pass);
        assert!(!r.all_pass());
        assert_eq!(r.max_residual(), 1e-6);
    }

    #[test]
    fn json_round_trip() {
        let mut r = VerifyReport::new("t", "Z2", 7);
        r.push("a", "x", 0.0, 1e-10);
        let s = serde_json::to_string(&r).unwrap();
        let back: VerifyReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back.cases.len(), 1);
        assert_eq!(back.suite, "t");
    }
}
