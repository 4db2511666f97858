//! Result tables and summary documents, each stamped with the config hash.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{ensure, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Rectangular table of reals with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl ResultTable {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        ensure!(row.len() == self.columns.len(), "row has {} values for {} columns", row.len(), self.columns.len());
        self.rows.push(row);
        Ok(())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Integer-valued columns print without an exponent.
    fn format(v: f64) -> String {
        if v.fract() == 0.0 && v.abs() < 1e15 {
            format!("{}", v as i64)
        } else {
            format!("{v:.16e}")
        }
    }

    pub fn to_csv(&self, hash: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# config_hash={hash}");
        let _ = writeln!(s, "# version={VERSION}");
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| Self::format(v)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

/// Output directory plus the metadata every file carries.
#[derive(Debug)]
pub struct Writer {
    dir: PathBuf,
    hash: String,
    warnings: Vec<String>,
}

impl Writer {
    pub fn new(dir: &Path, hash: String) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), hash, warnings: Vec::new() })
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        let m = message.into();
        if !self.warnings.contains(&m) {
            self.warnings.push(m);
        }
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn csv(&self, name: &str, table: &ResultTable) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, table.to_csv(&self.hash)).with_context(|| format!("writing {}", path.display()))
    }

    /// Writes `body` with a `metadata` object holding the hash, version and
    /// the warnings raised so far.
    pub fn json(&self, name: &str, body: impl Serialize) -> Result<()> {
        let mut value = serde_json::to_value(body)?;
        let meta = json!({ "config_hash": self.hash, "version": VERSION, "warnings": self.warnings });
        match &mut value {
            Value::Object(map) => {
                map.insert("metadata".into(), meta);
            }
            other => value = json!({ "data": other.take(), "metadata": meta }),
        }
        let mut text = serde_json::to_string_pretty(&value)?;
        text.push('\n');
        let path = self.dir.join(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = ResultTable::new(&["j", "p"]);
        t.push(vec![0.0, 0.25]).unwrap();
        t.push(vec![1.0, 1.0 / 3.0]).unwrap();
        assert!(t.push(vec![1.0]).is_err());
        let csv = t.to_csv("abc");
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# config_hash=abc");
        assert_eq!(lines[2], "j,p");
        assert_eq!(lines[3], "0,2.5000000000000000e-1");
        assert_eq!(lines[4].split(',').nth(1).unwrap().parse::<f64>().unwrap(), 1.0 / 3.0);
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn json_metadata() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = Writer::new(dir.path(), "h".into()).unwrap();
        w.warn("x");
        w.warn("x");
        w.json("a.json", json!({ "s": 1 })).unwrap();
        let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("a.json")).unwrap()).unwrap();
        assert_eq!(v["metadata"]["config_hash"], "h");
        assert_eq!(v["metadata"]["warnings"].as_array().unwrap().len(), 1);
    }
}
