use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::cli::Format;

pub const SCHEMA_VERSION: u32 = 1;

/// Rows of a CSV rendering; every cell is already formatted.
#[derive(Debug, Default)]
pub struct Csv {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Whether the computation itself succeeded, independently of rendering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    NotConverged,
    VerifyFailed,
}

/// Everything one subcommand produces.
pub struct Emission {
    pub result: Value,
    pub csv: Csv,
    pub table: String,
    pub status: Status,
}

/// Shortest decimal that round-trips to the same `f64`, in exponent notation
/// for very small or very large magnitudes.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result types serialize to JSON")
}

/// Two-column key/value table.
pub fn kv_table(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        let _ = writeln!(out, "{k:<width$}  {v}");
    }
    out
}

/// Column-aligned table from a CSV rendering.
pub fn grid_table(csv: &Csv) -> String {
    let mut widths: Vec<usize> = csv.header.iter().map(|h| h.chars().count()).collect();
    for row in &csv.rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.zip(&widths).enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            let _ = write!(s, "{cell:>w$}");
        }
        s.trim_end().to_string()
    };
    let mut out = line(&mut csv.header.iter().copied());
    out.push('\n');
    for row in &csv.rows {
        out.push_str(&line(&mut row.iter().map(String::as_str)));
        out.push('\n');
    }
    out
}

/// Top-level JSON document: schema and artifact versions, the echoed inputs,
/// an argument vector that replays the run, and the result.
pub fn envelope(command: &str, inputs: Value, replay: &[String], result: Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "version": sphera::VERSION,
        "command": command,
        "inputs": inputs,
        "replay": replay,
        "result": result,
    })
}

pub fn render(format: Format, document: &Value, emission: &Emission) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(document).expect("JSON values serialize");
            s.push('\n');
            s
        }
        Format::Csv => emission.csv.render(),
        Format::Table => emission.table.clone(),
    }
}

/// Writes `text` to `path` through a temporary file in the same directory,
/// renamed into place once complete.
pub fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
