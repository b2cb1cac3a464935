//! Output tables. CSV carries raw fractions at full precision; text renders
//! percentages and basis points with unit suffixes.

use std::fmt::Write as _;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Plain,
    /// Fraction shown as a percentage.
    Percent,
    /// Fraction shown in basis points.
    Bps,
    /// Already in basis points.
    RawBps,
    Usd,
    Days,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Num(f64),
    Int(i64),
    Flag(bool),
    Missing,
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

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
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

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<(String, Unit)>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Text,
}

impl Table {
    pub fn new(columns: &[(&str, Unit)]) -> Self {
        Self {
            columns: columns.iter().map(|(n, u)| (n.to_string(), *u)).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Text => Ok(self.to_text()),
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| CliError::Csv {
            path: "<output>".into(),
            message: e.to_string(),
        };
        w.write_record(self.columns.iter().map(|c| c.0.as_str())).map_err(err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(csv_cell)).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Csv {
            path: "<output>".into(),
            message: e.to_string(),
        })?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_text(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().zip(&self.columns).map(|(c, (_, u))| text_cell(c, *u)).collect())
            .collect();
        let headers: Vec<String> = self
            .columns
            .iter()
            .map(|(n, u)| match u {
                Unit::Percent => format!("{n} (%)"),
                Unit::Bps | Unit::RawBps => format!("{n} (bps)"),
                Unit::Usd => format!("{n} (USD)"),
                Unit::Days => format!("{n} (d)"),
                Unit::Plain => n.clone(),
            })
            .collect();
        let widths: Vec<usize> = (0..headers.len())
            .map(|i| cells.iter().map(|r| r[i].len()).chain([headers[i].len()]).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        let line = |out: &mut String, vals: &[String]| {
            let parts: Vec<String> = vals.iter().zip(&widths).map(|(v, w)| format!("{v:>w$}")).collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(&mut out, &headers);
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        line(&mut out, &rule);
        for r in &cells {
            line(&mut out, r);
        }
        out
    }
}

fn csv_cell(c: &Cell) -> String {
    match c {
        Cell::Text(s) => s.clone(),
        Cell::Num(v) => format!("{v}"),
        Cell::Int(v) => v.to_string(),
        Cell::Flag(b) => b.to_string(),
        Cell::Missing => String::new(),
    }
}

fn text_cell(c: &Cell, unit: Unit) -> String {
    match c {
        Cell::Num(v) if !v.is_finite() => format!("{v}"),
        Cell::Num(v) => match unit {
            Unit::Percent => format!("{:.2}", v * 100.0),
            Unit::Bps => format!("{:.2}", v * 1e4),
            Unit::RawBps => format!("{v:.2}"),
            Unit::Usd => format!("{v:.0}"),
            Unit::Days => format!("{v:.1}"),
            Unit::Plain => format!("{v:.4}"),
        },
        Cell::Missing => "--".into(),
        other => csv_cell(other),
    }
}
