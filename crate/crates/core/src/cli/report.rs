//! Rendering of command results as plain tables, CSV or JSON.

use std::io;

use clap::ValueEnum;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
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

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Left out of plain output (long per-sample listings).
    pub machine_only: bool,
}

impl Table {
    pub fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Self {
            name,
            columns: columns.to_vec(),
            rows: Vec::new(),
            machine_only: false,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub tables: Vec<Table>,
    /// Printed alone in plain output.
    pub scalar: Option<Complex64>,
    /// Extra fields for JSON output.
    pub extra: Map<String, Value>,
    pub passed: bool,
    pub failure: Option<String>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            tables: Vec::new(),
            scalar: None,
            extra: Map::new(),
            passed: true,
            failure: None,
        }
    }

    pub fn fail(&mut self, why: impl Into<String>) {
        self.passed = false;
        let why = why.into();
        self.failure = Some(match self.failure.take() {
            Some(prev) => format!("{prev}; {why}"),
            None => why,
        });
    }

    pub fn attach(&mut self, key: &str, value: &impl Serialize) {
        let value = serde_json::to_value(value).expect("report values serialize");
        self.extra.insert(key.to_string(), value);
    }

    pub fn without_samples(&self) -> Report {
        let mut copy = self.clone();
        copy.tables.retain(|t| !t.machine_only);
        copy
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Plain => self.plain(),
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn plain(&self) -> String {
        if let Some(z) = self.scalar {
            return format!("{}\n", plain_complex(z));
        }
        let tables: Vec<&Table> = self.tables.iter().filter(|t| !t.machine_only).collect();
        let mut out = String::new();
        for (i, table) in tables.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            if tables.len() > 1 {
                out.push_str(&format!("[{}]\n", table.name));
            }
            let cells: Vec<Vec<String>> = table
                .rows
                .iter()
                .map(|row| row.iter().map(plain_cell).collect())
                .collect();
            let widths: Vec<usize> = (0..table.columns.len())
                .map(|j| {
                    cells
                        .iter()
                        .map(|r| r[j].chars().count())
                        .chain([table.columns[j].len()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |items: Vec<&str>| {
                let padded: Vec<String> = items
                    .iter()
                    .zip(&widths)
                    .map(|(s, w)| format!("{s:<w$}"))
                    .collect();
                format!("{}\n", padded.join("  ").trim_end())
            };
            out.push_str(&line(table.columns.clone()));
            for row in &cells {
                out.push_str(&line(row.iter().map(String::as_str).collect()));
            }
        }
        if let Some(why) = &self.failure {
            out.push_str(&format!("\nFAILED: {why}\n"));
        }
        out
    }

    fn csv(&self) -> String {
        let mut out = String::new();
        for (i, table) in self.tables.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&table.columns.join(","));
            out.push('\n');
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(machine_cell).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
        }
        out
    }

    fn json(&self) -> String {
        let mut root = Map::new();
        root.insert("command".into(), Value::from(self.command));
        root.insert("passed".into(), Value::from(self.passed));
        if let Some(why) = &self.failure {
            root.insert("failure".into(), Value::from(why.as_str()));
        }
        if let Some(z) = self.scalar {
            root.insert("value".into(), Value::from(vec![z.re, z.im]));
        }
        for table in &self.tables {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = table
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(k, v)| (k.to_string(), json_cell(v)))
                        .collect();
                    Value::Object(obj)
                })
                .collect();
            root.insert(table.name.to_string(), Value::Array(rows));
        }
        for (k, v) in &self.extra {
            root.insert(k.clone(), v.clone());
        }
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, MachineFloats);
        Value::Object(root).serialize(&mut ser).expect("in-memory write");
        let mut text = String::from_utf8(buf).expect("json is utf-8");
        text.push('\n');
        text
    }
}

/// Compact JSON with every float written to 17 significant digits.
struct MachineFloats;

impl serde_json::ser::Formatter for MachineFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(machine(value).as_bytes())
    }
}

/// 17 significant digits, enough to round-trip any double.
pub fn machine(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// 6 significant digits, fixed notation for moderate magnitudes.
pub fn plain(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0.0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let fixed = format!("{x:.decimals$}");
        if fixed.contains('.') {
            let trimmed = fixed.trim_end_matches('0');
            if trimmed.ends_with('.') {
                format!("{trimmed}0")
            } else {
                trimmed.to_string()
            }
        } else {
            format!("{fixed}.0")
        }
    } else {
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{exp}")
    }
}

pub fn plain_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        plain(z.re)
    } else {
        let sign = if z.im.is_sign_negative() { '-' } else { '+' };
        format!("{}{}{}i", plain(z.re), sign, plain(z.im.abs()))
    }
}

fn plain_cell(c: &Cell) -> String {
    match c {
        Cell::Num(v) => plain(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Bool(v) => v.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Empty => "-".into(),
    }
}

fn machine_cell(c: &Cell) -> String {
    match c {
        Cell::Num(v) => machine(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Bool(v) => v.to_string(),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
        Cell::Empty => String::new(),
    }
}

fn json_cell(c: &Cell) -> Value {
    match c {
        Cell::Num(v) => Value::from(*v),
        Cell::Int(v) => Value::from(*v),
        Cell::Bool(v) => Value::from(*v),
        Cell::Text(s) => Value::from(s.as_str()),
        Cell::Empty => Value::Null,
    }
}
