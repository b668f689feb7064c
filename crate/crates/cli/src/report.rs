//! Report rendering: pretty JSON, or CSV with 17 significant digits.

use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
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

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    /// Single-row table of named values.
    pub fn record(fields: Vec<(&'static str, Cell)>) -> Self {
        let (header, row): (Vec<_>, Vec<_>) = fields.into_iter().unzip();
        Self { header, rows: vec![row] }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub json: Value,
    pub table: Table,
}

impl Report {
    pub fn new<T: serde::Serialize>(value: &T, table: Table) -> Result<Self, CliError> {
        let json = serde_json::to_value(value).map_err(|e| CliError::Internal(e.to_string()))?;
        Ok(Self { json, table })
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).map_err(|e| CliError::Internal(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let internal = |e: csv::Error| CliError::Internal(e.to_string());
                w.write_record(&self.table.header).map_err(internal)?;
                for row in &self.table.rows {
                    w.write_record(row.iter().map(Cell::render)).map_err(internal)?;
                }
                let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
                String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
            }
        }
    }
}
