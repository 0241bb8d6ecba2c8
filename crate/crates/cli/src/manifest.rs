use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::SCHEMA;
use crate::error::CliError;

/// Record of one run. Contains no timestamps so identical runs produce identical manifests.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub schema: u64,
    pub command: String,
    pub inputs: Vec<String>,
    pub seed: u64,
    pub outputs: Vec<String>,
    pub tool_version: &'static str,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64) -> Self {
        RunManifest {
            schema: SCHEMA,
            command: command.to_string(),
            inputs: Vec::new(),
            seed,
            outputs: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION"),
        }
    }

    pub fn input(&mut self, p: Option<&Path>) {
        if let Some(p) = p {
            self.inputs.push(p.display().to_string());
        }
    }

    pub fn output(&mut self, p: &Path) {
        self.outputs.push(p.display().to_string());
    }

    /// Written as `<first output>.manifest.json`, or to stderr when nothing was written.
    pub fn emit(&self) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        match self.outputs.first() {
            Some(first) => fs::write(manifest_path(Path::new(first)), text + "\n")?,
            None => eprintln!("{text}"),
        }
        Ok(())
    }
}

pub fn manifest_path(output: &Path) -> PathBuf {
    sibling(output, "manifest.json")
}

/// `<path>.<suffix>`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}
