//! Tabular reports and their CSV / JSON renderings.

use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            // 17 significant digits round-trip every double; adding zero
            // folds −0 into 0.
            Cell::Num(x) => format!("{:.16e}", x + 0.0),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    /// Non-finite numbers become JSON `null`.
    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Num(x) => json!(x + 0.0),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// A command's result: a table, trailing metadata, extra top-level JSON
/// fields and the process exit code.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Written after the rows in CSV, so the status ends the file.
    pub metadata: Vec<(String, Cell)>,
    pub extra: Map<String, Value>,
    pub exit_code: u8,
}

impl Report {
    pub fn new(command: &'static str, columns: &[&str]) -> Self {
        Report {
            command,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            metadata: Vec::new(),
            extra: Map::new(),
            exit_code: 0,
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Cell>) {
        self.metadata.push((key.to_string(), value.into()));
    }
}

fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn write_csv(out: &mut dyn Write, report: &Report, cfg: &RunConfig) -> std::io::Result<()> {
    writeln!(out, "# backreaction {}", report.command)?;
    let echo: Vec<String> = cfg.echo().iter().map(|(k, v)| format!("{k}={v}")).collect();
    writeln!(out, "# config: {}", echo.join("; "))?;
    if cfg.timestamp {
        writeln!(out, "# generated: {}", timestamp())?;
    }
    writeln!(out, "{}", report.columns.join(","))?;
    for row in &report.rows {
        let cells: Vec<String> = row.iter().map(Cell::csv).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    for (k, v) in &report.metadata {
        writeln!(out, "# {k}: {}", v.csv())?;
    }
    Ok(())
}

pub fn to_json(report: &Report, cfg: &RunConfig) -> Value {
    let config: Map<String, Value> = cfg.echo().into_iter().map(|(k, v)| (k, Value::String(v))).collect();
    let mut metadata: Map<String, Value> = report.metadata.iter().map(|(k, v)| (k.clone(), v.json())).collect();
    if cfg.timestamp {
        metadata.insert("generated".into(), json!(timestamp()));
    }
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
        .collect();
    let mut obj = Map::new();
    obj.insert("command".into(), json!(report.command));
    obj.insert("config".into(), Value::Object(config));
    obj.insert("metadata".into(), Value::Object(metadata));
    obj.insert("columns".into(), json!(report.columns));
    obj.insert("rows".into(), Value::Array(rows));
    for (k, v) in &report.extra {
        obj.insert(k.clone(), v.clone());
    }
    Value::Object(obj)
}

/// Writes the report to `--out` or stdout in the configured format.
pub fn emit(report: &Report, cfg: &RunConfig) -> std::io::Result<()> {
    let mut buf = Vec::new();
    match cfg.format {
        Format::Csv => write_csv(&mut buf, report, cfg)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, &to_json(report, cfg))?;
            buf.push(b'\n');
        }
    }
    match &cfg.out {
        Some(path) => std::fs::write(path, buf),
        None => std::io::stdout().lock().write_all(&buf),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("demo", &["n", "x"]);
        r.row(vec![Cell::from(1usize), Cell::from(0.1)]);
        r.meta("status", "converged");
        r
    }

    #[test]
    fn csv_numbers_round_trip() {
        let x = 0.1f64 + 0.2;
        let text = Cell::Num(x).csv();
        assert_eq!(text.parse::<f64>().unwrap(), x);
    }

    #[test]
    fn csv_status_is_the_last_line() {
        let cfg = RunConfig {
            timestamp: false,
            ..RunConfig::default()
        };
        let mut buf = Vec::new();
        write_csv(&mut buf, &sample(), &cfg).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().last(), Some("# status: converged"));
        assert!(text.lines().nth(1).unwrap().starts_with("# config: system=const-field"));
    }

    #[test]
    fn json_maps_non_finite_to_null() {
        let mut r = sample();
        r.row(vec![Cell::from(2usize), Cell::from(f64::NAN)]);
        let v = to_json(&r, &RunConfig::default());
        assert!(v["rows"][1][1].is_null());
        assert!(v["metadata"]["generated"].is_u64());
    }
}
