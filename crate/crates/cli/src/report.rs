//! Machine-readable run reports.

use std::fmt::Write as _;

use cstar_pm::CheckResult;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub status: Status,
    pub evaluated: usize,
    pub passed: usize,
    pub worst_margin: Option<f64>,
    pub counterexample: Option<Value>,
    pub note: Option<String>,
}

impl CheckEntry {
    pub fn from_check(prefix: &str, c: &CheckResult) -> Self {
        let status = if c.evaluated == 0 {
            Status::Skip
        } else if c.ok() {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            name: format!("{prefix}.{}", c.name),
            status,
            evaluated: c.evaluated,
            passed: c.passed,
            worst_margin: c.worst_margin,
            counterexample: c.counterexample.clone(),
            note: c.note.clone().or_else(|| (c.evaluated == 0).then(|| "no applicable samples".into())),
        }
    }

    /// A single yes/no verdict; failures carry `detail` as the counterexample.
    pub fn verdict(name: impl Into<String>, holds: bool, detail: Value) -> Self {
        Self {
            name: name.into(),
            status: if holds { Status::Pass } else { Status::Fail },
            evaluated: 1,
            passed: usize::from(holds),
            worst_margin: None,
            counterexample: (!holds).then_some(detail),
            note: None,
        }
    }

    pub fn skip(name: impl Into<String>, note: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: Status::Skip,
            evaluated: 0,
            passed: 0,
            worst_margin: None,
            counterexample: None,
            note: Some(note.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub checks: Vec<CheckEntry>,
    pub results: Value,
    /// Human-readable lines for the summary; not part of the JSON.
    pub headlines: Vec<String>,
    pub wall_time_ms: f64,
}

impl Report {
    pub fn new(command: impl Into<String>, config: Value) -> Self {
        Self { command: command.into(), config, checks: Vec::new(), results: json!({}), headlines: Vec::new(), wall_time_ms: 0.0 }
    }

    pub fn push(&mut self, entry: CheckEntry) {
        self.checks.push(entry);
    }

    pub fn extend_from(&mut self, prefix: &str, report: &cstar_pm::AxiomReport) {
        self.checks.extend(report.checks.iter().map(|c| CheckEntry::from_check(prefix, c)));
    }

    pub fn set_result(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).expect("report values serialize");
        if let Value::Object(map) = &mut self.results {
            map.insert(key.to_owned(), value);
        }
    }

    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed())
    }

    /// Everything but the wall time, with keys sorted.
    fn stable_value(&self) -> Value {
        json!({
            "command": self.command,
            "config": self.config,
            "checks": self.checks,
            "results": self.results,
        })
    }

    /// SHA-256 of the stable part of the report.
    pub fn digest(&self) -> String {
        let text = serde_json::to_string_pretty(&self.stable_value()).expect("report serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    /// Two-space indented JSON with sorted keys.
    pub fn to_json(&self) -> String {
        let mut value = self.stable_value();
        if let Value::Object(map) = &mut value {
            map.insert("digest".into(), json!(self.digest()));
            map.insert("wall_time_ms".into(), json!(self.wall_time_ms));
        }
        let mut text = serde_json::to_string_pretty(&value).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.command);
        for line in &self.headlines {
            let _ = writeln!(out, "  {line}");
        }
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skip => "SKIP",
            };
            let _ = write!(out, "  {tag} {} ({}/{})", c.name, c.passed, c.evaluated);
            if let Some(m) = c.worst_margin {
                let _ = write!(out, " worst margin {m:.3e}");
            }
            if let Some(n) = &c.note {
                let _ = write!(out, " [{n}]");
            }
            out.push('\n');
            if let Some(cx) = &c.counterexample {
                let _ = writeln!(out, "       counterexample: {cx}");
            }
        }
        let failed = self.checks.iter().filter(|c| c.status == Status::Fail).count();
        let _ = writeln!(out, "{} checks, {failed} failed", self.checks.len());
        let _ = writeln!(out, "digest: {}", self.digest());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("demo", json!({ "seed": 42, "alpha": [1, 3] }));
        r.push(CheckEntry::verdict("ok", true, json!(null)));
        r.set_result("x", 1.5);
        r
    }

    #[test]
    fn digest_ignores_wall_time() {
        let mut a = sample();
        let b = sample();
        a.wall_time_ms = 123.0;
        assert_eq!(a.digest(), b.digest());
        assert_ne!(a.to_json(), b.to_json());
    }

    #[test]
    fn keys_are_sorted_and_indented() {
        let text = sample().to_json();
        let keys: Vec<usize> =
            ["\"checks\"", "\"command\"", "\"config\"", "\"digest\"", "\"results\"", "\"wall_time_ms\""]
                .iter()
                .map(|k| text.find(k).unwrap())
                .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert!(text.contains("\n  \"checks\""));
    }

    #[test]
    fn failures_carry_payload_and_exit_one() {
        let mut r = sample();
        assert_eq!(r.exit_code(), 0);
        r.push(CheckEntry::verdict("bad", false, json!({ "why": "x" })));
        assert_eq!(r.exit_code(), 1);
        assert!(r.checks.iter().all(|c| c.status != Status::Fail || c.counterexample.is_some()));
    }
}
