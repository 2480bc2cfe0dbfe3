//! CSV and plain-text writers.
//!
//! Every file opens with `#` lines: the verb, the full configuration in file
//! syntax, then any run-specific notes. Numbers carry 12 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::config::ScenarioConfig;

pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

/// Header lines shared by all output files.
pub fn header(verb: &str, cfg: &ScenarioConfig, notes: &[String]) -> String {
    let mut h = String::new();
    let _ = writeln!(h, "## zapsim {verb} {}", env!("CARGO_PKG_VERSION"));
    h.push_str("## strip one leading '# ' from each header line to reuse it as a config file\n");
    for line in cfg.echo() {
        let _ = writeln!(h, "# {line}");
    }
    for n in notes {
        let _ = writeln!(h, "## {n}");
    }
    h
}

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), (PathBuf, io::Error)> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| (dir.to_owned(), e))?;
    }
    fs::write(path, contents).map_err(|e| (path.to_owned(), e))
}

/// `key = value` lines of a sidecar file.
#[derive(Default)]
pub struct Params(Vec<(String, String)>);

impl Params {
    pub fn add(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.0.push((key.to_owned(), value.to_string()));
        self
    }

    pub fn num(&mut self, key: &str, value: f64) -> &mut Self {
        self.add(key, num(value))
    }

    pub fn render(&self) -> String {
        self.0.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}
