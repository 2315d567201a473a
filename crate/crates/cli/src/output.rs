//! Record tables written as CSV (one header row, LF line endings) or as a
//! JSON array of objects with the same keys.

use std::io::Write;

use serde_json::{Map, Number, Value};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Uint(u64),
    Float(f64),
    Bool(bool),
    Str(String),
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Uint(v) => v.to_string(),
            Cell::Float(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Str(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Uint(v) => Value::from(*v),
            Cell::Float(v) => Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Bool(v) => Value::from(*v),
            Cell::Str(s) => Value::from(s.as_str()),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Uint(v as u64)
    }
}
impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Uint(v)
    }
}
impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Str(v.to_owned())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Str(v)
    }
}

/// Columns every table ends with.
pub const META_COLUMNS: [&str; 4] = ["seed", "samples", "truncation_tail", "version"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Meta {
    pub seed: u64,
    pub samples: usize,
    pub truncation_tail: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    /// A table whose columns are `columns` followed by [`META_COLUMNS`].
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().chain(META_COLUMNS.iter()).map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, mut cells: Vec<Cell>, meta: Meta) {
        cells.extend([
            Cell::Uint(meta.seed),
            Cell::Uint(meta.samples as u64),
            Cell::Float(meta.truncation_tail),
            Cell::Str(entgap::VERSION.to_string()),
        ]);
        assert_eq!(cells.len(), self.columns.len(), "row width");
        self.rows.push(cells);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    /// The first non-finite float, as (row, column).
    pub fn non_finite(&self) -> Option<(usize, &str)> {
        self.rows.iter().enumerate().find_map(|(i, row)| {
            row.iter().zip(&self.columns).find_map(|(c, name)| match c {
                Cell::Float(v) if !v.is_finite() => Some((i, name.as_str())),
                _ => None,
            })
        })
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv)).map_err(io)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.columns.iter().cloned().zip(row.iter().map(Cell::to_json)).collect();
                Value::Object(obj)
            })
            .collect();
        let mut out = serde_json::to_vec_pretty(&Value::Array(records))
            .map_err(|e| CliError::Io(e.to_string()))?;
        out.push(b'\n');
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

pub fn render(table: &Table, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    }
}

pub fn write_to(bytes: &[u8], out: Option<&std::path::Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["name", "value"]);
        let meta = Meta { seed: 42, samples: 10, truncation_tail: 0.0 };
        t.push(vec!["{1,2}".into(), 0.5.into()], meta);
        t.push(vec!["plain".into(), 1e-7.into()], meta);
        t
    }

    #[test]
    fn csv_layout() {
        let text = String::from_utf8(sample().to_csv().unwrap()).unwrap();
        let lines: Vec<&str> = text.split('\n').collect();
        assert_eq!(lines[0], "name,value,seed,samples,truncation_tail,version");
        assert!(lines[1].starts_with("\"{1,2}\",0.5,42,10,0,"));
        assert!(lines[2].starts_with("plain,0.0000001,42,10,0,"));
        assert!(!text.contains('\r'));
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn json_mirrors_records() {
        let v: Value = serde_json::from_slice(&sample().to_json().unwrap()).unwrap();
        let rows = v.as_array().unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0]["name"], "{1,2}");
        assert_eq!(rows[0]["value"], 0.5);
        assert_eq!(rows[1]["seed"], 42);
    }

    #[test]
    fn detects_non_finite() {
        let mut t = sample();
        assert!(t.non_finite().is_none());
        t.push(vec!["bad".into(), f64::NAN.into()], Meta { seed: 0, samples: 0, truncation_tail: 0.0 });
        assert_eq!(t.non_finite(), Some((2, "value")));
    }
}
