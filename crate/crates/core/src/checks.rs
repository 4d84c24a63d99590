//! Pass/fail records for runtime-checkable invariants.

use serde::Serialize;
use std::fmt;

/// Relative tolerance used for the real-valued lemma bounds.
pub const REL_TOL: f64 = 1e-9;
/// Absolute slack for covering feasibility (`lhs >= 1 - FEAS_TOL`).
pub const FEAS_TOL: f64 = 1e-12;

/// `lhs <= rhs` up to a relative tolerance.
pub fn le_rel(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + REL_TOL * rhs.abs()
}

/// `lhs >= rhs` up to a relative tolerance.
pub fn ge_rel(lhs: f64, rhs: f64) -> bool {
    lhs >= rhs - REL_TOL * rhs.abs()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    pub fn new(name: &'static str, passed: bool) -> Self {
        Check { name, passed, detail: String::new() }
    }

    pub fn with_detail(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Check { name, passed, detail: detail.into() }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        if self.detail.is_empty() {
            write!(f, "{verdict} {}", self.name)
        } else {
            write!(f, "{verdict} {} ({})", self.name, self.detail)
        }
    }
}

/// A batch of checks evaluated together.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LemmaReport {
    pub checks: Vec<Check>,
}

impl LemmaReport {
    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Running count of checks executed and failed during a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CheckTally {
    pub run: u64,
    pub failed: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failed_names: Vec<String>,
}

impl CheckTally {
    pub fn record(&mut self, check: &Check) {
        self.run += 1;
        if !check.passed {
            self.failed += 1;
            if self.failed_names.len() < 32 {
                self.failed_names.push(check.to_string());
            }
        }
    }

    pub fn record_all<'a>(&mut self, checks: impl IntoIterator<Item = &'a Check>) {
        for c in checks {
            self.record(c);
        }
    }

    pub fn merge(&mut self, other: &CheckTally) {
        self.run += other.run;
        self.failed += other.failed;
        for name in &other.failed_names {
            if self.failed_names.len() < 32 {
                self.failed_names.push(name.clone());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}
