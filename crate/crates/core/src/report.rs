//! Machine-readable campaign reports with a stable, diffable layout.

use serde::Serialize;

/// One named check within a campaign case.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub case: usize,
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Campaign outcome. Checks are listed in execution order, which is
/// deterministic for a fixed seed; every case is reproducible from
/// `(seed, case)`.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>, seed: u64) -> Self {
        SuiteReport {
            suite: suite.into(),
            seed,
            cases: 0,
            passed: 0,
            failed: 0,
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, case: usize, name: impl Into<String>, pass: bool, detail: Option<String>) {
        if pass {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        self.cases = self.cases.max(case + 1);
        self.checks.push(CheckResult {
            case,
            name: name.into(),
            pass,
            detail: if pass { None } else { detail },
        });
    }

    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn summary(&self) -> String {
        format!(
            "suite {}: {} checks over {} cases, {} passed, {} failed",
            self.suite,
            self.checks.len(),
            self.cases,
            self.passed,
            self.failed
        )
    }

    /// First failures, for human output.
    pub fn failures(&self, limit: usize) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.pass).take(limit).collect()
    }
}
