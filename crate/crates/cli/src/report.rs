//! Assertions, scenario outcomes and CSV output.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliError;

pub const SPECTRUM_HEADER: [&str; 5] = [
    "scenario_id",
    "index",
    "eigenvalue",
    "reference",
    "rel_error",
];
pub const TROTTER_HEADER: [&str; 6] = [
    "scenario_id",
    "N",
    "t",
    "pointwise_error",
    "time_avg_error",
    "fitted_order",
];
pub const COMPOSE_HEADER: [&str; 5] = ["scenario_id", "entry_row", "entry_col", "re", "im"];

/// Fixed 17-significant-digit float formatting for CSV cells.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub value: f64,
    pub limit: String,
    pub pass: bool,
}

impl Assertion {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit: format!("<= {limit:e}"),
            pass: value <= limit,
        }
    }

    pub fn within(name: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit: format!("{target} ± {tol}"),
            pass: (value - target).abs() <= tol,
        }
    }

    pub fn holds(name: impl Into<String>, pass: bool) -> Self {
        Self {
            name: name.into(),
            value: if pass { 1.0 } else { 0.0 },
            limit: "true".into(),
            pass,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioOutcome {
    pub id: String,
    pub kind: String,
    pub pass: bool,
    pub metrics: Map<String, Value>,
    pub files: Vec<String>,
    #[serde(skip)]
    pub assertions: Vec<Assertion>,
}

/// Collects metrics, assertions and files for one scenario; files land in
/// the run's output directory.
pub struct Recorder {
    id: String,
    dir: PathBuf,
    metrics: Map<String, Value>,
    files: Vec<String>,
    assertions: Vec<Assertion>,
}

impl Recorder {
    pub fn new(id: &str, dir: &Path) -> Self {
        Self {
            id: id.to_string(),
            dir: dir.to_path_buf(),
            metrics: Map::new(),
            files: Vec::new(),
            assertions: Vec::new(),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn metric(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.metrics.insert(key.to_string(), v);
    }

    pub fn assert(&mut self, a: Assertion) {
        self.assertions.push(a);
    }

    /// Writes `<id><suffix>.csv` with the given header.
    pub fn csv(
        &mut self,
        suffix: &str,
        header: &[&str],
        rows: &[Vec<String>],
    ) -> Result<(), CliError> {
        let name = format!("{}{suffix}.csv", self.id);
        let path = self.dir.join(&name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::io(path.display(), e))?;
        w.write_record(header)
            .map_err(|e| CliError::io(path.display(), e))?;
        for row in rows {
            w.write_record(row)
                .map_err(|e| CliError::io(path.display(), e))?;
        }
        w.flush().map_err(|e| CliError::io(path.display(), e))?;
        self.files.push(name);
        Ok(())
    }

    pub fn finish(self, kind: &str) -> ScenarioOutcome {
        ScenarioOutcome {
            pass: self.assertions.iter().all(|a| a.pass),
            id: self.id,
            kind: kind.to_string(),
            metrics: self.metrics,
            files: self.files,
            assertions: self.assertions,
        }
    }
}
