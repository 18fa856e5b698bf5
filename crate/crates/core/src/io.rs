//! Plain-text tables with a `#` metadata block.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// A numeric table: column names plus rows of equal length.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            metadata: Vec::new(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.metadata.push((key.into(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn write_to(&self, w: &mut impl Write) -> std::io::Result<()> {
        for (k, v) in &self.metadata {
            writeln!(w, "# {k}: {v}")?;
        }
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| format_cell(*x)).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("table output is ASCII")
    }

    /// Parses CSV text; `#` lines become metadata, the first other line is the header.
    pub fn parse(text: &str) -> Result<Self> {
        let mut table = Table::default();
        let mut have_header = false;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let (k, v) = rest.split_once(':').unwrap_or((rest, ""));
                table.metadata.push((k.trim().to_string(), v.trim().to_string()));
                continue;
            }
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if !have_header {
                table.columns = cells.iter().map(|s| s.to_string()).collect();
                have_header = true;
                continue;
            }
            if cells.len() != table.columns.len() {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected {} columns, got {}", table.columns.len(), cells.len()),
                });
            }
            let row = cells
                .iter()
                .map(|c| {
                    c.parse::<f64>().map_err(|_| Error::Parse {
                        line: i + 1,
                        message: format!("not a number: `{c}`"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            table.rows.push(row);
        }
        if !have_header {
            return Err(Error::Parse {
                line: 0,
                message: "missing header row".into(),
            });
        }
        Ok(table)
    }
}

fn format_cell(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x}")
    }
}

/// Writes `contents` to `path` via a temporary sibling and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::invalid("path", "output path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::Io(e)
    })
}
