//! Tabular output as CSV (with a commented header) or JSON.
//!
//! Floats are written with 17 significant digits in CSV; JSON carries the
//! same fields, with non-finite numbers as `null`.

use crate::config::{Format, Settings};
use crate::error::CliError;
use serde_json::{json, Map, Value};
use std::io::Write;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::Float(x) => float(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(n) => json!(n),
            Cell::Float(x) if x.is_finite() => json!(x),
            Cell::Float(_) => Value::Null,
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

/// Space-separated coordinates of a point.
pub fn coords(v: &[f64]) -> String {
    v.iter().map(|x| float(*x)).collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone)]
pub struct Document {
    pub command: &'static str,
    pub summary: Vec<(String, Cell)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Document {
    pub fn new(command: &'static str, columns: &[&'static str]) -> Self {
        Self {
            command,
            summary: Vec::new(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl Into<Cell>) {
        self.summary.push((key.into(), value.into()));
    }

    pub fn render(&self, settings: &Settings) -> Result<Vec<u8>, CliError> {
        match settings.format {
            Format::Csv => self.csv(settings),
            Format::Json => self.json(settings),
        }
    }

    fn csv(&self, settings: &Settings) -> Result<Vec<u8>, CliError> {
        let mut buf = Vec::new();
        let io = |e: std::io::Error| CliError::Output(e.to_string());
        writeln!(buf, "# manifold-rkhs {}", self.command).map_err(io)?;
        for (key, value, source) in &settings.provenance {
            writeln!(buf, "# {key} = {value} ({source})").map_err(io)?;
        }
        for (key, value) in &self.summary {
            writeln!(buf, "# {key}: {}", value.text()).map_err(io)?;
        }
        let mut writer = csv::Writer::from_writer(buf);
        let err = |e: csv::Error| CliError::Output(e.to_string());
        writer.write_record(&self.columns).map_err(err)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(Cell::text)).map_err(err)?;
        }
        writer.into_inner().map_err(|e| CliError::Output(e.to_string()))
    }

    fn json(&self, settings: &Settings) -> Result<Vec<u8>, CliError> {
        let config: Vec<Value> = settings
            .provenance
            .iter()
            .map(|(k, v, s)| json!({"key": k, "value": v, "source": s.to_string()}))
            .collect();
        let summary: Map<String, Value> = self.summary.iter().map(|(k, v)| (k.clone(), v.json())).collect();
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let object: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                Value::Object(object)
            })
            .collect();
        let doc = json!({
            "command": self.command,
            "config": config,
            "summary": summary,
            "columns": self.columns,
            "records": records,
        });
        let mut buf = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Output(e.to_string()))?;
        buf.push(b'\n');
        Ok(buf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_seventeen_significant_digits() {
        assert_eq!(float(0.1), "1.0000000000000001e-1");
        assert_eq!(float(1.0), "1.0000000000000000e0");
        assert_eq!(float(f64::INFINITY), "inf");
        let x: f64 = float(std::f64::consts::PI).parse().unwrap();
        assert_eq!(x, std::f64::consts::PI);
    }
}
