use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use serde_json::{Map, Value};

/// Where and how a report is written.
#[derive(Debug, Clone, PartialEq)]
pub enum Sink {
    /// Bare value for scalar results, CSV otherwise.
    Plain,
    Csv(Option<PathBuf>),
    Json(Option<PathBuf>),
}

impl Sink {
    /// `csv` and `json` select the format on stdout; anything else is a
    /// path whose extension picks the format.
    pub fn parse(out: Option<&str>) -> Self {
        match out {
            None => Sink::Plain,
            Some("csv") => Sink::Csv(None),
            Some("json") => Sink::Json(None),
            Some(path) if path.ends_with(".json") => Sink::Json(Some(path.into())),
            Some(path) => Sink::Csv(Some(path.into())),
        }
    }
}

/// A numeric cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
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

/// Shortest decimal that parses back to the same `f64`.
pub fn format_real(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:?}").trim_end_matches(".0").to_string()
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Real(v) => format_real(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Real(v) => serde_json::Number::from_f64(*v).map_or_else(|| Value::String(format_real(*v)), Value::Number),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
        }
    }
}

/// Tabular result with the resolved configuration that produced it.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub config: Map<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Always render as rows, even when there is only one.
    pub table: bool,
}

impl Report {
    pub fn new(command: &str, config: Map<String, Value>, columns: &[&str]) -> Self {
        Self {
            command: command.into(),
            config,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            table: false,
        }
    }

    pub fn tabular(mut self) -> Self {
        self.table = true;
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# dickman {}", env!("CARGO_PKG_VERSION")).unwrap();
        writeln!(s, "# command: {}", self.command).unwrap();
        for (k, v) in &self.config {
            let v = match v {
                Value::String(t) => t.clone(),
                other => other.to_string(),
            };
            writeln!(s, "# {k} = {v}").unwrap();
        }
        writeln!(s, "{}", self.columns.join(",")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::text).collect();
            writeln!(s, "{}", cells.join(",")).unwrap();
        }
        s
    }

    fn json(&self) -> String {
        let mut obj = Map::new();
        obj.insert("version".into(), Value::String(env!("CARGO_PKG_VERSION").into()));
        obj.insert("command".into(), Value::String(self.command.clone()));
        obj.insert("config".into(), Value::Object(self.config.clone()));
        let record = |row: &Vec<Cell>| {
            let m: Map<String, Value> = self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
            m
        };
        if self.rows.len() == 1 && !self.table {
            obj.extend(record(&self.rows[0]));
        } else {
            obj.insert("rows".into(), Value::Array(self.rows.iter().map(|r| Value::Object(record(r))).collect()));
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(obj)).unwrap();
        s.push('\n');
        s
    }

    fn plain(&self) -> String {
        if self.rows.len() == 1 && !self.table {
            format!("{}\n", self.rows[0][0].text())
        } else {
            self.csv()
        }
    }

    pub fn emit(&self, sink: &Sink) -> io::Result<()> {
        let (text, path) = match sink {
            Sink::Plain => (self.plain(), None),
            Sink::Csv(p) => (self.csv(), p.as_ref()),
            Sink::Json(p) => (self.json(), p.as_ref()),
        };
        match path {
            Some(p) => fs::write(p, text),
            None => {
                let mut out = io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.flush()
            }
        }
    }
}
