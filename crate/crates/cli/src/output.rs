//! Table serialization: CSV with `#` metadata lines, or a JSON array of
//! objects keyed by column name.

use std::io::{self, Write};

use serde_json::{Map, Number, Value};
use thetawell::FieldSample;

use crate::config::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn opt(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub meta: Vec<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(meta: Vec<String>, columns: Vec<&'static str>) -> Self {
        Self { meta, columns, rows: Vec::new() }
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> io::Result<()> {
        for line in &self.meta {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    fn write_json(&self, out: &mut dyn Write) -> io::Result<()> {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let object: Map<String, Value> =
                    self.columns.iter().zip(row).map(|(k, c)| (k.to_string(), c.json())).collect();
                Value::Object(object)
            })
            .collect();
        serde_json::to_writer_pretty(&mut *out, &records)?;
        writeln!(out)
    }
}

/// `[x, t, value, tag]` for one field sample; tagged samples carry no value.
pub fn sample_row(x: f64, t: Option<f64>, sample: FieldSample) -> Vec<Cell> {
    vec![Cell::Num(x), Cell::opt(t), Cell::opt(sample.value()), Cell::Text(sample.tag().as_str().into())]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Table {
        let mut t = Table::new(vec!["demo".into()], vec!["x", "t", "value", "tag"]);
        t.rows.push(sample_row(0.5, Some(0.0), FieldSample::Finite(2.0)));
        t.rows.push(sample_row(1.0, None, FieldSample::Pole));
        t
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        table().write(Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "# demo\nx,t,value,tag\n5e-1,0e0,2e0,finite\n1e0,,,pole\n");
    }

    #[test]
    fn json_layout() {
        let mut buf = Vec::new();
        table().write(Format::Json, &mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v[0]["value"], 2.0);
        assert_eq!(v[1]["value"], Value::Null);
        assert_eq!(v[1]["t"], Value::Null);
        assert_eq!(v[1]["tag"], "pole");
    }
}
