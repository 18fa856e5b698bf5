//! Output directory handling: CSV/JSON files written atomically plus a
//! sidecar log of skipped rows.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sqbo::io::{write_atomic, Table};

use crate::config::RunConfig;
use crate::error::CliError;

pub struct Output {
    dir: PathBuf,
    command: &'static str,
    seed: u64,
    timestamp: Option<u64>,
    echo: Vec<(String, String)>,
    notes: Vec<String>,
}

impl Output {
    pub fn new(dir: &Path, command: &'static str, cfg: &RunConfig, seed: u64, timestamp: bool) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Config(format!("cannot create output directory {}: {e}", dir.display())))?;
        let value = serde_json::to_value(cfg).map_err(|e| CliError::Config(e.to_string()))?;
        let echo = value
            .as_object()
            .expect("config serializes to an object")
            .iter()
            .map(|(k, v)| (k.clone(), v.to_string()))
            .collect();
        let timestamp = timestamp.then(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()));
        Ok(Self {
            dir: dir.to_path_buf(),
            command,
            seed,
            timestamp,
            echo,
            notes: Vec::new(),
        })
    }

    /// Records a skipped or degraded row for the sidecar log.
    pub fn note(&mut self, msg: impl Into<String>) {
        self.notes.push(msg.into());
    }

    fn with_header(&self, mut table: Table) -> Table {
        let mut meta = Vec::new();
        if let Some(t) = self.timestamp {
            meta.push(("generated_unix".to_string(), t.to_string()));
        }
        meta.push(("command".to_string(), self.command.to_string()));
        meta.push(("seed".to_string(), self.seed.to_string()));
        meta.extend(self.echo.iter().cloned());
        meta.append(&mut table.metadata);
        table.metadata = meta;
        table
    }

    pub fn write_table(&self, name: &str, table: Table) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        let text = self.with_header(table).to_csv_string();
        write_atomic(&path, text.as_bytes())?;
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(e.to_string()))?;
        write_atomic(&path, text.as_bytes())?;
        Ok(path)
    }

    /// Writes `<command>.log` when any row was skipped.
    pub fn finish(self) -> Result<Option<PathBuf>, CliError> {
        if self.notes.is_empty() {
            return Ok(None);
        }
        let path = self.dir.join(format!("{}.log", self.command));
        let mut text = self.notes.join("\n");
        text.push('\n');
        write_atomic(&path, text.as_bytes())?;
        Ok(Some(path))
    }
}
