//! CSV tables and the run manifest.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn render(&self, out: &mut String) {
        match self {
            Self::Int(v) => write!(out, "{v}"),
            // 17 significant digits round-trip every f64.
            Self::Float(v) => write!(out, "{v:.16e}"),
            Self::Bool(v) => write!(out, "{v}"),
            Self::Text(v) => write!(out, "{v}"),
        }
        .expect("writing to a String");
    }

    fn compare(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Self::Int(a), Self::Int(b)) => a.cmp(b),
            (Self::Float(a), Self::Float(b)) => a.total_cmp(b),
            (Self::Bool(a), Self::Bool(b)) => a.cmp(b),
            (Self::Text(a), Self::Text(b)) => a.cmp(b),
            _ => Ordering::Equal,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Self::Float(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Self::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Self::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Self::Text(v.to_owned())
    }
}

/// One diagnostic, written as `<name>.csv`.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Leading columns that identify a row.
    pub key_columns: usize,
}

impl Table {
    pub fn new(name: &'static str, columns: &[&'static str], key_columns: usize) -> Self {
        Self { name, columns: columns.to_vec(), rows: Vec::new(), key_columns }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for {}", self.name);
        self.rows.push(row);
    }

    /// Orders rows by the key columns so parallel runs emit the same bytes.
    pub fn sort(&mut self) {
        let k = self.key_columns;
        self.rows.sort_by(|a, b| {
            a[..k].iter().zip(&b[..k]).map(|(x, y)| x.compare(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
        });
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                cell.render(&mut out);
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Serialize)]
struct FileEntry {
    name: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    program: &'static str,
    version: &'static str,
    config: &'a RunConfig,
    files: Vec<FileEntry>,
    /// SHA-256 over the file names and contents, in listed order.
    content_hash: String,
}

/// Writes every table and then `manifest.json`. Each file goes through a
/// temporary name so an interrupted run leaves no truncated CSV behind.
pub fn write_all(dir: &Path, config: &RunConfig, tables: &mut [Table]) -> std::io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    tables.sort_by_key(|t| t.name);
    let mut files = Vec::with_capacity(tables.len());
    let mut total = Sha256::new();
    for table in tables.iter_mut() {
        table.sort();
        let name = format!("{}.csv", table.name);
        let bytes = table.to_csv().into_bytes();
        write_atomic(&dir.join(&name), &bytes)?;
        total.update(name.as_bytes());
        total.update([0u8]);
        total.update(&bytes);
        files.push(FileEntry { name, sha256: hex::encode(Sha256::digest(&bytes)) });
    }
    let manifest = Manifest {
        program: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config,
        files,
        content_hash: hex::encode(total.finalize()),
    };
    let path = dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
    text.push('\n');
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("partial");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        let mut t = Table::new("x", &["k", "v"], 1);
        t.push(vec![Cell::Int(2), Cell::Float(0.1)]);
        t.push(vec![Cell::Int(1), Cell::Float(-1.0 / 3.0)]);
        t.sort();
        let csv = t.to_csv();
        assert_eq!(csv, "k,v\n1,-3.3333333333333331e-1\n2,1.0000000000000001e-1\n");
        let parsed: f64 = csv.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(parsed, -1.0 / 3.0);
    }
}
