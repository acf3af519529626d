//! Plot-ready result tables.
//!
//! Column names carry their unit: `_hz` for ω/2π, `_k` for kelvin, `_db`
//! for decibels; bare names are dimensionless.

use crate::params::SystemParams;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<Option<String>> for Cell {
    fn from(s: Option<String>) -> Self {
        s.map_or(Cell::Empty, Cell::Text)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    /// Parameters the table was computed from.
    pub params: SystemParams<f64>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, params: SystemParams<f64>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            params,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Appends a row; panics if its width differs from the header.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width for table {}",
            self.name
        );
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of one column, `None` for empty or text cells.
    pub fn numbers(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.column(name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match r[k] {
                    Cell::Num(x) => Some(x),
                    _ => None,
                })
                .collect(),
        )
    }
}

/// ω/2π for `_hz` columns.
pub fn hz(omega: f64) -> f64 {
    omega / std::f64::consts::TAU
}
