use std::fmt::Write as _;

use serde_json::{Map, Value};
use twistosc::Check;

use crate::config::{OutputFormat, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // shortest round-trip form, at most 17 significant digits
            Cell::Float(x) => format!("{x:?}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) => Value::from(*x),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<i64> for Cell {
    fn from(i: i64) -> Self {
        Cell::Int(i)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<u32> for Cell {
    fn from(i: u32) -> Self {
        Cell::Int(i.into())
    }
}

impl From<i32> for Cell {
    fn from(i: i32) -> Self {
        Cell::Int(i.into())
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let k = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn json_rows(&self) -> Value {
        self.rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(k, v)| ((*k).to_owned(), v.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect()
    }
}

/// Output of one subcommand: a data table plus the invariant checks made
/// while producing it.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub args: Map<String, Value>,
    pub table: Table,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn render(&self, cfg: &RunConfig) -> String {
        match cfg.format {
            OutputFormat::Csv => self.table.to_csv(),
            OutputFormat::Json => {
                let mut config = cfg.to_json();
                config["command"] = Value::from(self.command);
                config["args"] = Value::Object(self.args.clone());
                let checks: Vec<Value> = self.checks.iter().map(check_json).collect();
                let mut doc = Map::new();
                doc.insert("config".into(), config);
                doc.insert("rows".into(), self.table.json_rows());
                doc.insert("checks".into(), Value::Array(checks));
                let mut s = serde_json::to_string_pretty(&Value::Object(doc))
                    .expect("JSON values always serialize");
                s.push('\n');
                s
            }
        }
    }

    /// Human-readable pass/fail matrix: one line per check.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let at = match (c.t, c.f) {
                (Some(t), Some(f)) => format!("t={t:?} f={f:?}"),
                _ => "-".to_owned(),
            };
            let _ = writeln!(
                out,
                "{} {:<16} {:<34} {:<22} {:.3e} <= {:.1e}",
                if c.passed { "PASS" } else { "FAIL" },
                c.module,
                c.invariant,
                at,
                c.observed,
                c.tolerance
            );
        }
        let failed = self.failures().count();
        let _ = writeln!(out, "{} checks, {} failed", self.checks.len(), failed);
        out
    }
}

fn check_json(c: &Check) -> Value {
    serde_json::to_value(c).expect("checks serialize")
}

pub(crate) fn check_table(checks: &[Check]) -> Table {
    let mut table = Table::new(&[
        "module",
        "invariant",
        "t",
        "f",
        "observed",
        "tolerance",
        "passed",
    ]);
    for c in checks {
        table.push(vec![
            c.module.into(),
            c.invariant.into(),
            c.t.map_or(Cell::Text(String::new()), Cell::Float),
            c.f.map_or(Cell::Text(String::new()), Cell::Float),
            c.observed.into(),
            c.tolerance.into(),
            c.passed.into(),
        ]);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["a", "b", "c"]);
        t.push(vec![0.1.into(), 3i64.into(), "x,y".into()]);
        t.push(vec![1e-20.into(), (-2i64).into(), "z".into()]);
        assert_eq!(t.to_csv(), "a,b,c\n0.1,3,\"x,y\"\n1e-20,-2,z\n");
    }

    #[test]
    fn empty_table_keeps_header() {
        assert_eq!(Table::new(&["t", "f"]).to_csv(), "t,f\n");
    }

    #[test]
    fn floats_round_trip() {
        for x in [
            0.1 + 0.2,
            std::f64::consts::PI,
            1.0 / 3.0,
            6.02214076e23,
            -2.5e-310,
        ] {
            let s = Cell::Float(x).csv();
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let digits = s
                .trim_start_matches('-')
                .split('e')
                .next()
                .unwrap()
                .replace('.', "");
            assert!(digits.trim_start_matches('0').len() <= 17, "{s}");
        }
    }
}
