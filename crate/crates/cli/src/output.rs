//! Tables, manifests and the output directory.

use std::fs;
use std::path::{Path, PathBuf};

use minsurf::verify::{Check, CriterionReport};
use serde::Serialize;
use serde_json::{json, Value};

use crate::Format;

#[derive(Debug, Clone)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
    B(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as i64)
    }
}

impl From<i32> for Cell {
    fn from(v: i32) -> Self {
        Cell::I(v.into())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::B(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::S(v)
    }
}

/// Seventeen significant digits, enough to round-trip any double.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::F(v) => fmt_f64(*v),
            Cell::I(v) => v.to_string(),
            Cell::S(s) => s.clone(),
            Cell::B(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(v) => json!(v),
            Cell::I(v) => json!(v),
            Cell::S(s) => json!(s),
            Cell::B(b) => json!(b),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&'static str]) -> Self {
        Self { name: name.into(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// A named group of checks, e.g. one acceptance criterion.
#[derive(Debug, Clone, Serialize)]
pub struct CheckGroup {
    pub group: String,
    pub pass: bool,
    pub checks: Vec<CheckRecord>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

impl From<&Check> for CheckRecord {
    fn from(c: &Check) -> Self {
        Self { name: c.name.clone(), value: c.value, tol: c.tol, pass: c.pass }
    }
}

impl CheckGroup {
    pub fn new(group: impl Into<String>, checks: &[Check]) -> Self {
        Self {
            group: group.into(),
            pass: !checks.is_empty() && checks.iter().all(|c| c.pass),
            checks: checks.iter().map(CheckRecord::from).collect(),
        }
    }

    pub fn criterion(rep: &CriterionReport) -> Self {
        Self::new(format!("criterion {}: {}", rep.id, rep.title), &rep.checks)
    }
}

/// Everything a subcommand produces.
#[derive(Debug, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub groups: Vec<CheckGroup>,
    /// Headline numbers echoed to stdout and the manifest.
    pub summary: Vec<(String, Value)>,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.groups.iter().all(|g| g.pass)
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) {
        self.summary.push((key.to_owned(), json!(value)));
    }
}

pub fn write_table(dir: &Path, t: &Table, format: Format) -> std::io::Result<PathBuf> {
    match format {
        Format::Csv => {
            let path = dir.join(format!("{}.csv", t.name));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(&t.columns)?;
            for row in &t.rows {
                w.write_record(row.iter().map(Cell::text))?;
            }
            w.flush()?;
            Ok(path)
        }
        Format::Json => {
            let path = dir.join(format!("{}.json", t.name));
            let rows: Vec<Value> = t.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
            let doc = json!({ "columns": t.columns, "rows": rows });
            fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n")?;
            Ok(path)
        }
    }
}

pub fn write_manifest(
    dir: &Path,
    subcommand: &str,
    config: Value,
    wall_time: f64,
    artifacts: &[PathBuf],
    outcome: &Outcome,
) -> std::io::Result<PathBuf> {
    let path = dir.join(format!("{subcommand}.manifest.json"));
    let summary: serde_json::Map<String, Value> = outcome.summary.iter().cloned().collect();
    let doc = json!({
        "tool": "minsurf",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": subcommand,
        "config": config,
        "wall_time_s": wall_time,
        "artifacts": artifacts.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "summary": summary,
        "checks": outcome.groups,
        "pass": outcome.pass(),
    });
    fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n")?;
    Ok(path)
}
