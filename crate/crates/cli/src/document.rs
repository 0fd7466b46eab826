//! Result documents and their CSV / JSON encodings.
//!
//! Floating-point values are written with 17 significant digits in both
//! formats, so the two encodings of one run carry identical numbers and every
//! value parses back to the same `f64`.

use std::io::{self, Write};

use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

pub const SCHEMA_VERSION: &str = "1";

/// `{:.16e}`: 17 significant digits, enough to round-trip any `f64`.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Compact JSON formatter that prints floats with [`format_f64`].
#[derive(Debug, Default, Clone, Copy)]
pub struct SigDigits;

impl Formatter for SigDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }
}

/// Serializes `value` as JSON with 17-digit floats and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigits);
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Bool(bool),
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    fn to_csv_field(&self) -> String {
        match self {
            Cell::Bool(b) => b.to_string(),
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format_f64(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            _ => None,
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Bool(b) => s.serialize_bool(*b),
            Cell::Int(i) => s.serialize_i64(*i),
            // Non-finite values have no JSON number form.
            Cell::Num(x) if !x.is_finite() => s.serialize_str(&x.to_string()),
            Cell::Num(x) => s.serialize_f64(*x),
            Cell::Text(t) => s.serialize_str(t),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
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

/// A rectangular payload with named columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Index of the column called `name`.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv_field))?;
        }
        w.into_inner().map_err(|e| e.into_error().into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// Envelope for every command's output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub schema_version: String,
    pub command: String,
    pub parameters: serde_json::Value,
    pub produced_at: String,
    pub payload: Table,
}

impl ResultDocument {
    pub fn new(command: impl Into<String>, parameters: serde_json::Value, payload: Table) -> Self {
        ResultDocument {
            schema_version: SCHEMA_VERSION.to_string(),
            command: command.into(),
            parameters,
            produced_at: timestamp(),
            payload,
        }
    }

    /// CSV carries only the payload; JSON carries the whole envelope.
    pub fn encode(&self, format: Format) -> Result<Vec<u8>, String> {
        match format {
            Format::Csv => self.payload.to_csv().map_err(|e| e.to_string()),
            Format::Json => to_json(self).map_err(|e| e.to_string()),
        }
    }
}

/// RFC 3339 UTC time, or `SOURCE_DATE_EPOCH` when set for reproducible output.
fn timestamp() -> String {
    use time::format_description::well_known::Rfc3339;
    use time::OffsetDateTime;
    let now = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.parse::<i64>().ok())
        .and_then(|s| OffsetDateTime::from_unix_timestamp(s).ok())
        .unwrap_or_else(OffsetDateTime::now_utc);
    now.format(&Rfc3339).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_both_formats() {
        let values = [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.8185160000000002];
        for x in values {
            assert_eq!(format_f64(x).parse::<f64>().unwrap(), x);
            let json = to_json(&x).unwrap();
            let back: f64 = serde_json::from_slice(&json).unwrap();
            assert_eq!(back, x);
        }
    }

    #[test]
    fn csv_and_json_carry_the_same_digits() {
        let mut t = Table::new(&["name", "value"]);
        t.push(vec!["x".into(), Cell::Num(0.1)]);
        let csv = String::from_utf8(t.to_csv().unwrap()).unwrap();
        let json = String::from_utf8(to_json(&t).unwrap()).unwrap();
        let digits = format_f64(0.1);
        assert!(csv.contains(&digits));
        assert!(json.contains(&digits));
        assert_eq!(csv.lines().next(), Some("name,value"));
    }

    #[test]
    fn document_round_trips_through_json() {
        let mut t = Table::new(&["m", "d1", "ok"]);
        t.push(vec![Cell::Int(2), Cell::Num(0.818516), Cell::Bool(true)]);
        let doc = ResultDocument::new("tables", serde_json::json!({"which": 3}), t);
        let back: ResultDocument = serde_json::from_slice(&doc.encode(Format::Json).unwrap()).unwrap();
        assert_eq!(back, doc);
    }
}
