//! CSV v1 series and plain-text summaries.

use std::fmt::Display;
use std::fs;
use std::path::Path;

use anyhow::Context;

pub const CSV_VERSION_LINE: &str = "# cqednet-csv v1";

/// A time series with optional cells; `None` is written as an empty field.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Self { header, rows: Vec::new() }
    }

    fn index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Column values; `None` if the column is missing or has any empty cell.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.index(name)?;
        self.rows.iter().map(|r| r[i].filter(|v| !v.is_nan())).collect()
    }

    pub fn to_csv(&self) -> anyhow::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| match c {
                Some(v) if v.is_finite() => format!("{v:e}"),
                _ => String::new(),
            }))?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?)?;
        Ok(format!("{CSV_VERSION_LINE}\n{body}"))
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        fs::write(path, self.to_csv()?).with_context(|| format!("writing {}", path.display()))
    }
}

/// Ordered `key: value` lines.
#[derive(Debug, Clone, Default)]
pub struct Summary {
    pub entries: Vec<(String, String)>,
}

impl Summary {
    pub fn push(&mut self, key: impl Into<String>, value: impl Display) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn extend(&mut self, other: Summary) {
        self.entries.extend(other.entries);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|e| e.0 == key).map(|e| e.1.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key)?.parse().ok()
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        fs::write(path, self.render()).with_context(|| format!("writing {}", path.display()))
    }
}
