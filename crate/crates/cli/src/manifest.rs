//! Run manifests written beside every command's outputs.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

impl FileDigest {
    pub fn of(path: &Path) -> Result<Self> {
        let data = fs::read(path).with_context(|| format!("digesting {}", path.display()))?;
        Ok(FileDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&data)),
            bytes: data.len() as u64,
        })
    }
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub toolkit: &'static str,
    pub version: &'static str,
    pub command: String,
    pub argv: Vec<String>,
    /// Effective options after merging the config file and flags.
    pub options: serde_json::Value,
    pub seeds: Vec<u64>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub started_at: String,
    pub finished_at: String,
}

/// Collects inputs and outputs while a command runs.
#[derive(Debug, Clone)]
pub struct Recorder {
    command: String,
    argv: Vec<String>,
    options: serde_json::Value,
    seeds: Vec<u64>,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    started_at: String,
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

impl Recorder {
    pub fn new(command: &str, argv: &[String], options: &impl Serialize) -> Self {
        Recorder {
            command: command.to_string(),
            argv: argv.to_vec(),
            options: serde_json::to_value(options).unwrap_or_default(),
            seeds: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            started_at: now(),
        }
    }

    pub fn seed(&mut self, seed: u64) {
        if !self.seeds.contains(&seed) {
            self.seeds.push(seed);
        }
    }

    pub fn input(&mut self, path: &Path) {
        self.inputs.push(path.to_path_buf());
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let digests = |paths: &[PathBuf]| paths.iter().map(|p| FileDigest::of(p)).collect::<Result<Vec<_>>>();
        let manifest = RunManifest {
            toolkit: "absa-forge",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command.clone(),
            argv: self.argv.clone(),
            options: self.options.clone(),
            seeds: self.seeds.clone(),
            inputs: digests(&self.inputs)?,
            outputs: digests(&self.outputs)?,
            started_at: self.started_at.clone(),
            finished_at: now(),
        };
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        log::info!("manifest {}", path.display());
        Ok(())
    }
}

/// `out.jsonl` → `out.manifest.json`.
pub fn beside(output: &Path) -> PathBuf {
    let stem = output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    output.with_file_name(format!("{stem}.manifest.json"))
}
