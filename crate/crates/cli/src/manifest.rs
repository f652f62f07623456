//! Output-directory manifest: what each file holds and which columns form
//! the plot axes.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::io::json_line;

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub description: String,
    pub x: String,
    pub y: String,
}

impl FileEntry {
    pub fn new(name: impl Into<String>, description: &str, x: &str, y: &str) -> Self {
        Self {
            name: name.into(),
            description: description.to_string(),
            x: x.to_string(),
            y: y.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub master_seed: u64,
    pub files: Vec<FileEntry>,
    #[serde(skip)]
    config: String,
}

impl Manifest {
    pub fn new(command: &str, cfg: &ExperimentConfig) -> Self {
        Self {
            command: command.to_string(),
            master_seed: cfg.master_seed,
            files: Vec::new(),
            config: cfg
                .to_text()
                .lines()
                .filter(|l| !l.starts_with("output ="))
                .map(|l| format!("{l}\n"))
                .collect(),
        }
    }

    pub fn file(mut self, entry: FileEntry) -> Self {
        self.files.push(entry);
        self
    }

    /// Writes `manifest.json` and the resolved `config.txt` (without the
    /// output directory, so outputs compare equal across locations).
    pub fn write(&self, dir: &Path) -> CliResult<()> {
        let path = dir.join("manifest.json");
        fs::write(&path, json_line(self) + "\n").map_err(|e| CliError::io(&path, e))?;
        let path = dir.join("config.txt");
        fs::write(&path, &self.config).map_err(|e| CliError::io(&path, e))
    }
}
