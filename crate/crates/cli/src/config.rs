//! JSON description of a Fredholm problem.
//!
//! ```json
//! {
//!   "interval": [0, 1],
//!   "m": 41,
//!   "kernels": {
//!     "K11": {"type": "constant", "value": 0.2},
//!     "K12": {"type": "separable", "c": 0.1},
//!     "K21": {"type": "table", "values": [[0.1, 0.2], [0.2, 0.1]]},
//!     "K22": {"type": "constant", "value": 0.0}
//!   },
//!   "g": {"g1": {"type": "poly", "coeffs": [0, 1]}, "g2": {"type": "constant", "value": 1}}
//! }
//! ```

use std::fmt;

use cstar_pm::fredholm::{FredholmProblem, GSpec, KernelSpec, Table};
use serde::Deserialize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: ")?,
            (Some(l), None) => write!(f, "line {l}: ")?,
            _ => {}
        }
        if !self.path.is_empty() {
            write!(f, "{}: ", self.path)?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FredholmConfig {
    interval: [f64; 2],
    m: usize,
    kernels: KernelsConfig,
    g: GConfig,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelsConfig {
    #[serde(rename = "K11")]
    k11: KernelEntry,
    #[serde(rename = "K12")]
    k12: KernelEntry,
    #[serde(rename = "K21")]
    k21: KernelEntry,
    #[serde(rename = "K22")]
    k22: KernelEntry,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GConfig {
    g1: GEntry,
    g2: GEntry,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum KernelEntry {
    Constant { value: f64 },
    Separable { c: f64 },
    Table { values: Vec<Vec<f64>> },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum GEntry {
    Constant { value: f64 },
    Poly { coeffs: Vec<f64> },
    Table { values: Vec<f64> },
}

impl From<KernelEntry> for KernelSpec {
    fn from(e: KernelEntry) -> Self {
        match e {
            KernelEntry::Constant { value } => KernelSpec::Constant(value),
            KernelEntry::Separable { c } => KernelSpec::Separable(c),
            KernelEntry::Table { values } => KernelSpec::Table(Table { values }),
        }
    }
}

impl From<GEntry> for GSpec {
    fn from(e: GEntry) -> Self {
        match e {
            GEntry::Constant { value } => GSpec::Constant(value),
            GEntry::Poly { coeffs } => GSpec::Poly(coeffs),
            GEntry::Table { values } => GSpec::Table(values),
        }
    }
}

fn line_of_key(text: &str, key: &str) -> Option<usize> {
    let quoted = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&quoted)).map(|i| i + 1)
}

fn schema_error(err: serde_path_to_error::Error<serde_json::Error>) -> ConfigError {
    let mut path = err.path().to_string();
    if path == "." {
        path.clear();
    }
    let inner = err.into_inner();
    let (line, column) = if inner.line() > 0 { (Some(inner.line()), Some(inner.column())) } else { (None, None) };
    let mut message = inner.to_string();
    if let Some(cut) = message.rfind(" at line ") {
        message.truncate(cut);
    }
    if let Some(field) = message.strip_prefix("missing field `").and_then(|r| r.strip_suffix('`')) {
        path = if path.is_empty() { field.to_owned() } else { format!("{path}.{field}") };
    }
    ConfigError { line, column, path, message }
}

/// Parses and validates a Fredholm problem. Errors carry the line and the
/// field path, e.g. `kernels.K22`.
pub fn parse_fredholm_config(text: &str) -> Result<FredholmProblem, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: FredholmConfig = serde_path_to_error::deserialize(&mut *de).map_err(schema_error)?;
    de.end().map_err(|e| ConfigError {
        line: Some(e.line()),
        column: Some(e.column()),
        path: String::new(),
        message: "trailing characters after the document".into(),
    })?;

    let semantic = |path: &str, message: String| ConfigError {
        line: line_of_key(text, path.rsplit('.').next().unwrap_or(path)),
        column: None,
        path: path.to_owned(),
        message,
    };
    let [a, b] = cfg.interval;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(semantic("interval", format!("[{a}, {b}] violates a < b")));
    }
    if cfg.m < 2 {
        return Err(semantic("m", format!("node count {} must be at least 2", cfg.m)));
    }

    let k = cfg.kernels;
    let kernels = [[k.k11.into(), k.k12.into()], [k.k21.into(), k.k22.into()]];
    let g = [cfg.g.g1.into(), cfg.g.g2.into()];
    FredholmProblem::new((a, b), kernels, g, cfg.m).map_err(|e| {
        let message = e.to_string();
        let path = ["K11", "K12", "K21", "K22", "g1", "g2"]
            .iter()
            .find(|name| message.contains(&format!("{name}:")))
            .map(|name| if name.starts_with('K') { format!("kernels.{name}") } else { format!("g.{name}") })
            .unwrap_or_default();
        semantic(&path, message)
    })
}
