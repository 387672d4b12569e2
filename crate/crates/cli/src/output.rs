//! Report files and the run manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

#[derive(Serialize)]
struct Entry {
    name: String,
    path: String,
    pass: bool,
    seconds: f64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    schema: &'static str,
    tool_version: &'static str,
    command: &'a str,
    config: &'a BTreeMap<String, Value>,
    reports: &'a [Entry],
    data_files: &'a [String],
    started_unix: f64,
    wall_clock_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    pass: bool,
}

/// Collects the reports of one command invocation.
pub struct Run {
    dir: PathBuf,
    command: String,
    started: SystemTime,
    clock: Instant,
    last: Instant,
    reports: Vec<Entry>,
    data: Vec<String>,
}

impl Run {
    pub fn new(dir: &Path, command: &str) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
        let now = Instant::now();
        Ok(Run {
            dir: dir.to_path_buf(),
            command: command.to_string(),
            started: SystemTime::now(),
            clock: now,
            last: now,
            reports: Vec::new(),
            data: Vec::new(),
        })
    }

    fn write(&self, file: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(file);
        std::fs::write(&path, bytes).map_err(|e| CliError::Failed(format!("cannot write {}: {e}", path.display())))
    }

    /// Writes `<name>.json` and records its verdict; the time since the
    /// previous report is attributed to it.
    pub fn report(&mut self, name: &str, value: &impl Serialize, pass: bool) -> Result<(), CliError> {
        let file = format!("{name}.json");
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Failed(e.to_string()))?;
        text.push('\n');
        self.write(&file, text.as_bytes())?;
        let now = Instant::now();
        self.reports.push(Entry {
            name: name.into(),
            path: file,
            pass,
            seconds: (now - self.last).as_secs_f64(),
        });
        self.last = now;
        println!("{:<28} {}", name, if pass { "pass" } else { "FAIL" });
        Ok(())
    }

    /// Writes a plot-ready data file.
    pub fn data(&mut self, file: &str, contents: &str) -> Result<(), CliError> {
        self.write(file, contents.as_bytes())?;
        self.data.push(file.into());
        Ok(())
    }

    pub fn pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn finish(&self, config: &BTreeMap<String, Value>, error: Option<String>) -> Result<(), CliError> {
        let started_unix = self
            .started
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs_f64())
            .unwrap_or(0.0);
        let m = Manifest {
            schema: "manifest.v1",
            tool_version: env!("CARGO_PKG_VERSION"),
            command: &self.command,
            config,
            reports: &self.reports,
            data_files: &self.data,
            started_unix,
            wall_clock_seconds: self.clock.elapsed().as_secs_f64(),
            pass: error.is_none() && self.pass(),
            error,
        };
        let text = serde_json::to_string_pretty(&m).map_err(|e| CliError::Failed(e.to_string()))?;
        self.write("manifest.json", text.as_bytes())
    }
}
