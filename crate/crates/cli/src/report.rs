//! Verification report: one record per check, stable order, JSON on disk.

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckResult {
    pub name: String,
    pub paper_anchor: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
    pub millis: u64,
}

impl CheckResult {
    pub fn new(
        name: impl Into<String>,
        anchor: impl Into<String>,
        residual: f64,
        threshold: f64,
        millis: u64,
    ) -> Self {
        CheckResult {
            name: name.into(),
            paper_anchor: anchor.into(),
            residual,
            threshold,
            pass: residual <= threshold,
            millis,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub version: String,
    pub timestamp: String,
    pub checks: Vec<CheckResult>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn assemble(mut checks: Vec<CheckResult>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let passed = checks.iter().filter(|c| c.pass).count();
        VerificationReport {
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            summary: Summary {
                total: checks.len(),
                passed,
            },
            checks,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.passed == self.summary.total
    }

    /// UTF-8 JSON, newline-terminated.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
