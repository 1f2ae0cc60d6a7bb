//! CSV and JSON artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use limitcycle::format::sig12;
use serde::Serialize;

/// One CSV field.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
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

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => sig12(*v),
            Cell::Empty => String::new(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
        }
    }
}

pub fn csv_string(header: &[&str], rows: &[Vec<Cell>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(Cell::render).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<PathBuf> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path.to_path_buf())
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<Cell>]) -> Result<PathBuf> {
    write_text(path, &csv_string(header, rows))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

/// `1.5` -> `1.5`, `5` -> `5`, safe for file names.
pub fn eps_tag(eps: f64) -> String {
    sig12(eps).replace('-', "m")
}
