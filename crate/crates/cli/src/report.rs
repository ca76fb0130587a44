//! Report output: JSON with a fixed float format, and CSV.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Finite floats as numbers, anything else as `null`.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Exponents may be infinite; those are written as `"inf"`.
pub fn exponent(x: f64) -> Value {
    if x == f64::INFINITY {
        Value::String("inf".into())
    } else {
        num(x)
    }
}

/// Pretty printer writing every float with 17 significant digits.
struct FixedFloats(PrettyFormatter<'static>);

impl Formatter for FixedFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json_string(value: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloats(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("serializing a json value cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("json output is utf-8")
}

/// One cell of a result table.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Bool(bool),
    Missing,
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Float)
    }
}

impl Cell {
    fn json(&self) -> Value {
        match *self {
            Cell::Int(i) => Value::from(i),
            Cell::Float(x) => exponent(x),
            Cell::Text(ref s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(b),
            Cell::Missing => Value::Null,
        }
    }

    fn text(&self) -> String {
        match *self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) if x == f64::INFINITY => "inf".into(),
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Text(ref s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Missing => String::new(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Smallest and largest value of each float column.
    pub fn summary(&self) -> Map<String, Value> {
        let mut out = Map::new();
        for (k, name) in self.columns.iter().enumerate() {
            let values: Vec<f64> = self
                .rows
                .iter()
                .filter_map(|r| match r[k] {
                    Cell::Float(x) => Some(x),
                    _ => None,
                })
                .collect();
            if values.is_empty() {
                continue;
            }
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            out.insert((*name).into(), serde_json::json!({"min": num(lo), "max": num(hi)}));
        }
        out
    }

    pub fn rows_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let obj = self.columns.iter().zip(r).map(|(c, v)| ((*c).to_string(), v.json()));
                    Value::Object(obj.collect())
                })
                .collect(),
        )
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::text))?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    /// Fixed-width text table for the terminal.
    pub fn pretty(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| match *c {
                        Cell::Float(x) if x.is_finite() => format!("{x:.6}"),
                        _ => c.text(),
                    })
                    .collect()
            })
            .collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|k| cells.iter().map(|r| r[k].len()).fold(self.columns[k].len(), usize::max))
            .collect();
        let line = |items: Vec<&str>| {
            items
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        let mut out = line(self.columns.clone());
        out.push('\n');
        for r in &cells {
            out.push_str(&line(r.iter().map(String::as_str).collect()));
            out.push('\n');
        }
        out
    }
}

/// Writes `text` to `out`, or to stdout when no path is given.
pub fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            let mut w = BufWriter::new(file);
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
