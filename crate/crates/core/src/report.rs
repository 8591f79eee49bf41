//! Pass/fail tallies shared by every sample-based checker.

use serde::Serialize;
use serde_json::Value;

/// Result of one named property check over a batch of samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub evaluated: usize,
    pub passed: usize,
    /// Smallest observed slack of the checked inequality; negative on failure.
    pub worst_margin: Option<f64>,
    /// First failing sample, possibly followed by a shrunk witness.
    pub counterexample: Option<Value>,
    pub note: Option<String>,
}

impl CheckResult {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            evaluated: 0,
            passed: 0,
            worst_margin: None,
            counterexample: None,
            note: None,
        }
    }

    pub fn ok(&self) -> bool {
        self.passed == self.evaluated && self.counterexample.is_none()
    }

    /// Records one sample. The witness closure only runs on the first failure.
    pub fn record(&mut self, holds: bool, margin: Option<f64>, witness: impl FnOnce() -> Value) {
        self.evaluated += 1;
        if let Some(m) = margin {
            self.worst_margin = Some(self.worst_margin.map_or(m, |w| w.min(m)));
        }
        if holds {
            self.passed += 1;
        } else if self.counterexample.is_none() {
            self.counterexample = Some(witness());
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// A set of property checks run against one subject.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub subject: String,
    pub trials: usize,
    pub checks: Vec<CheckResult>,
}

impl AxiomReport {
    pub fn new(subject: impl Into<String>, trials: usize, checks: Vec<CheckResult>) -> Self {
        Self { subject: subject.into(), trials, checks }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckResult::ok)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.ok())
    }
}

pub(crate) fn require_trials(trials: usize) -> crate::Result<()> {
    if trials == 0 {
        Err(crate::Error::InvalidArgument("trials must be at least 1".into()))
    } else {
        Ok(())
    }
}
