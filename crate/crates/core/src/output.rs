//! CSV tables and JSON run manifests.
//!
//! Numbers are written in plain decimal, switching to scientific notation for
//! magnitudes below 1e-4 (and above 1e16, where plain decimal gets unwieldy).
//! Every CSV gets a sibling `<stem>.manifest.json` holding the full resolved
//! configuration, so a table can be regenerated from its manifest alone.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::Value;

use crate::error::{invalid, Result};

/// Formats a number for CSV output.
pub fn format_number(v: f64) -> String {
    let a = v.abs();
    if v.is_finite() && a > 0.0 && !(1e-4..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_number(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
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
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// A header row plus data rows of equal width.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(invalid(
                "row",
                format!("expected {} columns, got {}", self.header.len(), row.len()),
            ));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn to_csv_string(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }
}

/// Flat manifest: every key at the top level, serialized in sorted key order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    fields: BTreeMap<String, Value>,
}

impl Manifest {
    pub fn insert(&mut self, key: impl Into<String>, value: impl Into<Value>) {
        self.fields.insert(key.into(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.get(key)
    }

    /// Adds every field of a serializable struct (which must serialize to a map).
    pub fn extend_from<T: serde::Serialize>(&mut self, value: &T) {
        if let Ok(Value::Object(map)) = serde_json::to_value(value) {
            self.fields.extend(map);
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.fields).expect("JSON values serialize")
    }
}

/// Collects the files written by one command and removes them all if the
/// command does not finish.
pub struct OutputSet {
    dir: PathBuf,
    command: String,
    started: Instant,
    tables: Vec<(String, Table)>,
    written: Vec<PathBuf>,
    committed: bool,
}

impl OutputSet {
    pub fn new(dir: impl Into<PathBuf>, command: impl Into<String>) -> Self {
        Self {
            dir: dir.into(),
            command: command.into(),
            started: Instant::now(),
            tables: Vec::new(),
            written: Vec::new(),
            committed: false,
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Queues a table; nothing touches the disk until [`OutputSet::write`].
    pub fn add(&mut self, file_name: impl Into<String>, table: Table) {
        self.tables.push((file_name.into(), table));
    }

    /// Writes every queued CSV and its manifest. `manifest` holds the shared
    /// configuration; per-file keys are added here.
    pub fn write(mut self, manifest: &Manifest) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(&self.dir).map_err(|e| io_error(&self.dir, e))?;
        let names: Vec<String> = self.tables.iter().map(|(n, _)| n.clone()).collect();
        let elapsed = self.started.elapsed().as_secs_f64();
        let tables = std::mem::take(&mut self.tables);
        for (name, table) in &tables {
            let csv_path = self.dir.join(name);
            let manifest_path = self.dir.join(manifest_name(name));
            let mut m = manifest.clone();
            m.insert("command", self.command.clone());
            m.insert("tool_version", env!("CARGO_PKG_VERSION"));
            m.insert("output", csv_path.display().to_string());
            m.insert("run_outputs", names.clone());
            m.insert("wall_clock_seconds", elapsed);
            self.written.push(csv_path.clone());
            fs::write(&csv_path, table.to_csv_string()).map_err(|e| io_error(&csv_path, e))?;
            self.written.push(manifest_path.clone());
            fs::write(&manifest_path, m.to_json()).map_err(|e| io_error(&manifest_path, e))?;
        }
        self.committed = true;
        Ok(tables.iter().map(|(n, _)| self.dir.join(n)).collect())
    }
}

impl Drop for OutputSet {
    fn drop(&mut self) {
        if !self.committed {
            for path in &self.written {
                let _ = fs::remove_file(path);
            }
        }
    }
}

/// `figure1_t1.5.csv` → `figure1_t1.5.manifest.json`.
pub fn manifest_name(csv_name: &str) -> String {
    let stem = csv_name.strip_suffix(".csv").unwrap_or(csv_name);
    format!("{stem}.manifest.json")
}

fn io_error(path: &Path, e: std::io::Error) -> crate::error::Error {
    invalid("output", format!("{}: {e}", path.display()))
}
