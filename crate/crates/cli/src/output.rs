//! Table rendering. Numbers use the shortest decimal string that parses back
//! to the same f64, so CSV and JSON carry identical values.

use std::io::Write;

use serde_json::{Map, Value};

use crate::config::Format;

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

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
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

/// Shortest round-trip decimal form of `v`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        ryu::Buffer::new().format_finite(v).to_string()
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => fmt_f64(*v),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(i) => Value::from(*i),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

/// Command output: metadata lines plus a rectangular table.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub config: Vec<(&'static str, Cell)>,
    /// Scalar results shown in the header (search verdicts and the like).
    pub summary: Vec<(&'static str, Cell)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(command: &'static str, config: Vec<(&'static str, Cell)>, columns: Vec<&'static str>) -> Self {
        Self {
            command,
            config,
            summary: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn seed(&self) -> Cell {
        self.config
            .iter()
            .find(|(k, _)| *k == "seed")
            .map_or(Cell::Empty, |(_, v)| v.clone())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn csv(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("# tool: qthermo {}\n", env!("CARGO_PKG_VERSION")));
        s.push_str(&format!("# command: {}\n", self.command));
        s.push_str(&format!("# seed: {}\n", self.seed().csv()));
        for (k, v) in &self.config {
            s.push_str(&format!("# config.{k}: {}\n", v.csv()));
        }
        for (k, v) in &self.summary {
            s.push_str(&format!("# result.{k}: {}\n", v.csv()));
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    fn json(&self) -> String {
        let obj = |pairs: &[(&'static str, Cell)]| {
            Value::Object(pairs.iter().map(|(k, v)| (k.to_string(), v.json())).collect::<Map<_, _>>())
        };
        let mut meta = Map::new();
        meta.insert("tool".into(), Value::from("qthermo"));
        meta.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
        meta.insert("command".into(), Value::from(self.command));
        meta.insert("seed".into(), self.seed().json());
        meta.insert("config".into(), obj(&self.config));
        if !self.summary.is_empty() {
            meta.insert("result".into(), obj(&self.summary));
        }
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.to_string(), v.json()))
                        .collect::<Map<_, _>>(),
                )
            })
            .collect();
        let mut root = Map::new();
        root.insert("meta".into(), Value::Object(meta));
        root.insert("records".into(), Value::Array(records));
        let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("JSON values are serialisable");
        s.push('\n');
        s
    }

    pub fn write(&self, format: Format, out: Option<&std::path::Path>) -> std::io::Result<()> {
        let text = self.render(format);
        match out {
            Some(p) => std::fs::write(p, text),
            None => {
                let mut h = std::io::stdout().lock();
                h.write_all(text.as_bytes())?;
                h.flush()
            }
        }
    }
}
