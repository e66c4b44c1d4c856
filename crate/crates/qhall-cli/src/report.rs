//! Tabular results and their json/csv/latex renderings.

use clap::ValueEnum;
use qhall::ScalarHalf;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Latex,
}

#[derive(Debug, Clone)]
pub enum Cell {
    Text(String),
    Int(i64),
    Scalar(ScalarHalf),
    Json(Value),
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<i64> for Cell {
    fn from(n: i64) -> Self {
        Cell::Int(n)
    }
}

impl From<ScalarHalf> for Cell {
    fn from(c: ScalarHalf) -> Self {
        Cell::Scalar(c)
    }
}

impl From<Vec<i64>> for Cell {
    fn from(v: Vec<i64>) -> Self {
        Cell::Json(json!(v))
    }
}

impl Cell {
    /// Exact JSON: scalars as `[u-exponent, num, den]` triples.
    fn to_json(&self) -> Value {
        match self {
            Cell::Text(s) => json!(s),
            Cell::Int(n) => json!(n),
            Cell::Scalar(c) => json!(c),
            Cell::Json(v) => v.clone(),
        }
    }

    fn to_text(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(n) => n.to_string(),
            Cell::Scalar(c) => c.to_pretty(),
            Cell::Json(v) => v.to_string(),
        }
    }

    fn to_latex(&self) -> String {
        match self {
            Cell::Scalar(c) => format!("${}$", c.to_latex()),
            other => latex_escape(&other.to_text()),
        }
    }
}

fn latex_escape(s: &str) -> String {
    let mut out = String::new();
    for ch in s.chars() {
        match ch {
            '&' | '%' | '$' | '#' | '_' | '{' | '}' => {
                out.push('\\');
                out.push(ch);
            }
            '^' => out.push_str("\\^{}"),
            '~' => out.push_str("\\~{}"),
            '\\' => out.push_str("\\textbackslash{}"),
            _ => out.push(ch),
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct Report {
    pub title: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(title: impl Into<String>, columns: &[&'static str]) -> Self {
        Self { title: title.into(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut m = Map::new();
                for (c, x) in self.columns.iter().zip(r) {
                    m.insert((*c).into(), x.to_json());
                }
                Value::Object(m)
            })
            .collect();
        json!({ "title": self.title, "columns": self.columns, "rows": rows })
    }

    pub fn to_csv(&self) -> anyhow::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::to_text))?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn to_latex(&self) -> String {
        let mut s = format!("% {}\n\\begin{{tabular}}{{{}}}\n", self.title, "l".repeat(self.columns.len()));
        let head: Vec<String> = self.columns.iter().map(|c| latex_escape(c)).collect();
        s += &format!("{} \\\\ \\hline\n", head.join(" & "));
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(Cell::to_latex).collect();
            s += &format!("{} \\\\\n", cells.join(" & "));
        }
        s + "\\end{tabular}\n"
    }

    pub fn render(&self, f: Format) -> anyhow::Result<String> {
        Ok(match f {
            Format::Json => serde_json::to_string_pretty(&self.to_json())? + "\n",
            Format::Csv => self.to_csv()?,
            Format::Latex => self.to_latex(),
        })
    }
}
