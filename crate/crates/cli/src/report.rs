use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use std::fs;
use std::path::Path;

/// Comparison applied between `observed` and `expected`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = ">")]
    Above,
    /// `|observed − expected| ≤ tol`.
    #[serde(rename = "==")]
    Within,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub relation: Relation,
    pub expected: f64,
    pub observed: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Assertion {
    pub fn new(name: impl Into<String>, relation: Relation, expected: f64, observed: f64, tol: f64) -> Self {
        let pass = match relation {
            Relation::AtMost => observed <= expected + tol,
            Relation::Below => observed < expected,
            Relation::AtLeast => observed >= expected - tol,
            Relation::Above => observed > expected,
            Relation::Within => (observed - expected).abs() <= tol,
        };
        Assertion { name: name.into(), relation, expected, observed, tol, pass }
    }

    pub fn at_most(name: impl Into<String>, observed: f64, bound: f64) -> Self {
        Self::new(name, Relation::AtMost, bound, observed, 0.0)
    }

    pub fn below(name: impl Into<String>, observed: f64, bound: f64) -> Self {
        Self::new(name, Relation::Below, bound, observed, 0.0)
    }

    pub fn at_least(name: impl Into<String>, observed: f64, bound: f64) -> Self {
        Self::new(name, Relation::AtLeast, bound, observed, 0.0)
    }

    pub fn above(name: impl Into<String>, observed: f64, bound: f64) -> Self {
        Self::new(name, Relation::Above, bound, observed, 0.0)
    }

    pub fn within(name: impl Into<String>, observed: f64, expected: f64, tol: f64) -> Self {
        Self::new(name, Relation::Within, expected, observed, tol)
    }

    /// Boolean check recorded as `observed = 1` against `expected = 1`.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, Relation::Within, 1.0, if ok { 1.0 } else { 0.0 }, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub name: &'static str,
    pub description: &'static str,
}

pub const fn col(name: &'static str, description: &'static str) -> Column {
    Column { name, description }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub description: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, description: impl Into<String>, columns: Vec<Column>) -> Self {
        Table { name: name.into(), description: description.into(), columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }
}

/// Shortest round-trip decimal form; `inf`/`NaN` spelled out.
pub fn num(x: f64) -> String {
    format!("{x}")
}

/// What an experiment hands back before files are written.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub results: Value,
    pub assertions: Vec<Assertion>,
    pub tables: Vec<Table>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub experiment: String,
    pub version: String,
    pub seed: u64,
    pub config: Value,
    pub results: Value,
    pub assertions: Vec<Assertion>,
    pub tables: Vec<String>,
    pub pass: bool,
}

#[derive(Serialize)]
struct SchemaTable<'a> {
    file: String,
    description: &'a str,
    columns: &'a [Column],
}

#[derive(Serialize)]
struct Schema<'a> {
    experiment: &'a str,
    version: &'a str,
    tables: Vec<SchemaTable<'a>>,
}

pub const REPORT_FILE: &str = "report.json";
pub const SCHEMA_FILE: &str = "schema.json";

/// Writes `report.json`, `schema.json` and one CSV per table into `dir`.
pub fn write_outputs(dir: &Path, experiment: &str, seed: u64, config: Value, outcome: &Outcome) -> Result<Report> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let version = crate::version();
    for t in &outcome.tables {
        let path = dir.join(t.file_name());
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(t.columns.iter().map(|c| c.name))?;
        for r in &t.rows {
            w.write_record(r)?;
        }
        w.flush()?;
    }
    let schema = Schema {
        experiment,
        version: &version,
        tables: outcome
            .tables
            .iter()
            .map(|t| SchemaTable { file: t.file_name(), description: &t.description, columns: &t.columns })
            .collect(),
    };
    fs::write(dir.join(SCHEMA_FILE), serde_json::to_string_pretty(&schema)? + "\n")?;
    let report = Report {
        experiment: experiment.to_string(),
        version,
        seed,
        config,
        results: outcome.results.clone(),
        assertions: outcome.assertions.clone(),
        tables: outcome.tables.iter().map(Table::file_name).collect(),
        pass: outcome.passed(),
    };
    fs::write(dir.join(REPORT_FILE), serde_json::to_string_pretty(&report)? + "\n")?;
    Ok(report)
}
