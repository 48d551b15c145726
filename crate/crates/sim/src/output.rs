//! CSV and JSON artifacts. Both start with the same metadata: schema version,
//! study, the full config and the mode grid.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::{Format, Scenario};
use crate::error::SimError;

pub const SCHEMA_VERSION: u32 = 1;

/// Written for `-∞` log-magnitudes, which have no JSON or decimal form.
pub const NEG_INF_SENTINEL: &str = "-inf";

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    /// Rejects NaN and `+∞`; `-∞` is allowed and written as the sentinel.
    pub fn push(&mut self, row: Vec<f64>) -> Result<(), SimError> {
        assert_eq!(row.len(), self.columns.len(), "row width");
        if let Some((i, v)) = row.iter().enumerate().find(|(_, v)| v.is_nan() || **v == f64::INFINITY) {
            return Err(SimError::Regime(format!("column `{}` produced {v}", self.columns[i])));
        }
        self.rows.push(row);
        Ok(())
    }
}

/// 17 significant digits: enough to round-trip any `f64`.
pub fn format_number(v: f64) -> String {
    if v == f64::NEG_INFINITY {
        NEG_INF_SENTINEL.to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn json_number(v: f64) -> Value {
    if v == f64::NEG_INFINITY {
        Value::String(NEG_INF_SENTINEL.into())
    } else {
        json!(v)
    }
}

pub fn metadata(scenario: &Scenario, study: &str, timestamp: Option<u64>) -> Value {
    let mut meta = json!({
        "schema_version": SCHEMA_VERSION,
        "study": study,
    });
    if let Some(ts) = timestamp {
        meta["generated_unix"] = json!(ts);
    }
    meta["config"] = serde_json::to_value(&scenario.config).expect("config serializes");
    meta["grid"] = json!({
        "dk": scenario.grid.dk(),
        "k_max": scenario.grid.k_max(),
        "modes": scenario.grid.len(),
    });
    meta
}

pub fn to_csv(table: &Table, meta: &Value) -> String {
    let mut out = String::new();
    for (key, value) in meta.as_object().expect("metadata object") {
        let text = match value {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        writeln!(out, "# {key}: {text}").unwrap();
    }
    writeln!(out, "{}", table.columns.join(",")).unwrap();
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|&v| format_number(v)).collect();
        writeln!(out, "{}", cells.join(",")).unwrap();
    }
    out
}

pub fn to_json(table: &Table, meta: &Value) -> Value {
    let mut doc = meta.clone();
    doc["columns"] = json!(table.columns);
    doc["rows"] =
        Value::Array(table.rows.iter().map(|r| Value::Array(r.iter().map(|&v| json_number(v)).collect())).collect());
    doc
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, SimError> {
    fs::create_dir_all(dir).map_err(|e| SimError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| SimError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

/// Write `table` in each configured format; returns the paths written.
pub fn write_table(
    table: &Table,
    meta: &Value,
    dir: &Path,
    stem: &str,
    formats: &[Format],
) -> Result<Vec<PathBuf>, SimError> {
    let mut paths = Vec::new();
    for f in formats {
        paths.push(match f {
            Format::Csv => write_file(dir, &format!("{stem}.csv"), &to_csv(table, meta))?,
            Format::Json => write_file(dir, &format!("{stem}.json"), &pretty(&to_json(table, meta)))?,
        });
    }
    Ok(paths)
}

pub fn write_report(report: &Value, dir: &Path, stem: &str) -> Result<PathBuf, SimError> {
    write_file(dir, &format!("{stem}.json"), &pretty(report))
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}
