//! Tabular reports with a fixed column set, written as CSV or JSON.

use std::io::Write;

use lmoments::Complex64;
use serde_json::{Map, Value};

use crate::config::{Format, RunConfig};

pub const TOOL: &str = concat!("lmoments ", env!("CARGO_PKG_VERSION"));

const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// Splits a complex value into its `re` and `im` cells.
pub fn complex(z: Complex64) -> [Cell; 2] {
    [Cell::Float(z.re), Cell::Float(z.im)]
}

/// Rounds to twelve significant digits.
pub fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Twelve significant digits, trailing zeros dropped, exponent form outside `[1e-5, 1e15)`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let rounded = round_significant(x);
    let magnitude = rounded.abs();
    if (1e-5..1e15).contains(&magnitude) {
        return format!("{rounded}");
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exponent) = sci.split_once('e').expect("exponent form");
    let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
    format!("{mantissa}e{exponent}")
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_number(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => serde_json::Number::from_f64(round_significant(*v)).map_or(Value::Null, Value::Number),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(columns: &'static [&'static str]) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match the column set");
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, config: &RunConfig, out: W) -> anyhow::Result<()> {
        match config.format {
            Format::Csv => self.write_csv(config, out),
            Format::Json => self.write_json(config, out),
        }
    }

    fn write_csv<W: Write>(&self, config: &RunConfig, mut out: W) -> anyhow::Result<()> {
        writeln!(out, "# {TOOL}")?;
        writeln!(out, "# subcommand: {}", config.subcommand.name())?;
        writeln!(out, "# config: {}", serde_json::to_string(config)?)?;
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(self.columns)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(Cell::to_csv))?;
        }
        writer.flush()?;
        Ok(())
    }

    fn write_json<W: Write>(&self, config: &RunConfig, mut out: W) -> anyhow::Result<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let object: Map<String, Value> =
                    self.columns.iter().zip(row).map(|(name, cell)| (name.to_string(), cell.to_json())).collect();
                Value::Object(object)
            })
            .collect();
        let document = serde_json::json!({
            "tool": TOOL,
            "config": config,
            "columns": self.columns,
            "rows": rows,
        });
        serde_json::to_writer_pretty(&mut out, &document)?;
        writeln!(out)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(0.5), "0.5");
        assert_eq!(format_number(-2.5), "-2.5");
        assert_eq!(format_number(std::f64::consts::PI), "3.14159265359");
        assert_eq!(format_number(123456.7890123456), "123456.789012");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(2.0e20), "2e20");
        assert_eq!(format_number(-1.234567890123456e-9), "-1.23456789012e-9");
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(f64::NAN), "nan");
        assert_eq!(format_number(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn json_cells() {
        assert_eq!(Cell::Float(f64::NAN).to_json(), Value::Null);
        assert_eq!(Cell::Float(0.1 + 0.2).to_json(), serde_json::json!(0.3));
        assert_eq!(Cell::from(None::<u32>).to_json(), Value::Null);
        assert_eq!(Cell::from(7_u32).to_csv(), "7");
    }
}
