//! Atomic file writes and CSV formatting.
//!
//! Floats in CSV files are written as `{:.16e}` (17 significant digits), so
//! the bytes depend only on the values.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use bakerdim_core::dimension::DimensionEstimate;

use crate::error::{CliError, CliResult};

/// Writes `bytes` to `dir/name` through a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    let mut f = fs::File::create(&tmp).map_err(|e| CliError::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| CliError::io(&tmp, e))?;
    f.sync_all().map_err(|e| CliError::io(&tmp, e))?;
    drop(f);
    fs::rename(&tmp, &path).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone)]
pub enum Cell {
    F(f64),
    I(u64),
    S(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::I(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::S(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::S(v.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "csv row width");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, c) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match c {
                    Cell::F(v) => out.push_str(&fmt_f64(*v)),
                    Cell::I(v) => {
                        let _ = write!(out, "{v}");
                    }
                    Cell::S(s) => out.push_str(s),
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, dir: &Path, name: &str) -> CliResult<PathBuf> {
        write_atomic(dir, name, self.render().as_bytes())
    }
}

/// Per-scale table behind a dimension estimate: every scale in the window,
/// with the statistic that was regressed on `ln ε`.
pub fn scale_table(est: &DimensionEstimate) -> Csv {
    let mut csv = Csv::new(&["epsilon", "ln_epsilon", "statistic", "count"]);
    for s in &est.counts {
        csv.push(vec![s.epsilon.into(), s.epsilon.ln().into(), s.statistic.into(), s.count.into()]);
    }
    csv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(3.0), "3.0000000000000000e0");
        let v: f64 = fmt_f64(std::f64::consts::PI).parse().unwrap();
        assert_eq!(v, std::f64::consts::PI);
    }

    #[test]
    fn csv_and_atomic_write() {
        let dir = tempfile::tempdir().unwrap();
        let mut csv = Csv::new(&["a", "b", "c"]);
        csv.push(vec![1.5.into(), 2usize.into(), "x".into()]);
        let path = csv.write(dir.path(), "t.csv").unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert_eq!(text, "a,b,c\n1.5000000000000000e0,2,x\n");
        let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names.len(), 1);
    }
}
