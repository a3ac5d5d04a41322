use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// One CSV table.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    /// File name without extension.
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, columns: &[&'static str]) -> Self {
        Self { name: name.into(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        self.rows.push(row);
    }

    /// Values of one column.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Checks the declared columns and the row shapes. NaN marks an
    /// undefined value; infinities are rejected.
    pub fn check_schema(&self, expected: &[&str]) -> Result<()> {
        if self.columns != expected {
            return Err(Error::Schema(format!("{}: columns {:?}, expected {:?}", self.name, self.columns, expected)));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.columns.len() {
                return Err(Error::Schema(format!("{}: row {i} has {} fields", self.name, row.len())));
            }
            if row.iter().any(|x| x.is_infinite()) {
                return Err(Error::Schema(format!("{}: row {i} has an infinite value", self.name)));
            }
        }
        if self.rows.is_empty() {
            return Err(Error::Schema(format!("{}: no rows", self.name)));
        }
        Ok(())
    }
}

/// Formats with 17 significant digits.
pub fn format_value(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Header comment lines, column row, then values; LF line endings.
pub fn render_csv(header: &[String], ds: &Dataset) -> String {
    let mut s = String::new();
    for line in header {
        let _ = writeln!(s, "# {line}");
    }
    let _ = writeln!(s, "{}", ds.columns.join(","));
    for row in &ds.rows {
        let fields: Vec<String> = row.iter().map(|&x| format_value(x)).collect();
        let _ = writeln!(s, "{}", fields.join(","));
    }
    s
}

/// Writes through a temporary file in the same directory and renames it into
/// place, so readers never observe a partial file.
pub fn write_atomic(dir: &Path, file_name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let target = dir.join(file_name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(&target).map_err(|e| Error::Io(format!("{}: {}", target.display(), e.error)))?;
    Ok(target)
}
