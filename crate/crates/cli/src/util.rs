use std::fs;
use std::path::{Path, PathBuf};

use absa_forge::ingest::read_canonical_str;
use absa_forge::{applicable_tasks, Capabilities, Dataset, SentimentLexicon, Task, TemplateRegistry};
use anyhow::Context;

use crate::error::{usage, Result};

pub fn required<T: Clone>(value: &Option<T>, flag: &str) -> Result<T> {
    value.clone().ok_or_else(|| usage(format!("missing required option --{flag}")))
}

pub fn parse_flag<T>(value: &str, flag: &str) -> Result<T>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| usage(format!("--{flag}: {e}")))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn load_canonical(path: &Path) -> Result<Dataset> {
    let content = read_text(path)?;
    let loaded = read_canonical_str(&content, false).with_context(|| format!("loading {}", path.display()))?;
    Ok(loaded.dataset)
}

/// Writes a file, creating parent directories.
pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

pub fn ensure_dir(path: &Path) -> Result<PathBuf> {
    fs::create_dir_all(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(path.to_path_buf())
}

/// `all`, `applicable`, or a comma list of task names.
pub fn parse_tasks(spec: &str, caps: Capabilities) -> Result<Vec<Task>> {
    match spec.trim().to_lowercase().as_str() {
        "all" => Ok(Task::ALL.to_vec()),
        "applicable" => Ok(applicable_tasks(caps)),
        list => list
            .split(',')
            .map(|t| parse_flag::<Task>(t.trim(), "tasks"))
            .collect(),
    }
}

/// `positive,negative,neutral` words, e.g. `great,bad,ok`.
pub fn parse_lexicon(spec: Option<&str>) -> Result<SentimentLexicon> {
    let Some(spec) = spec else {
        return Ok(SentimentLexicon::default());
    };
    let words: Vec<&str> = spec.split(',').map(str::trim).collect();
    let [pos, neg, neu] = words[..] else {
        return Err(usage("--lexicon takes three comma-separated words"));
    };
    SentimentLexicon::new(pos, neg, neu).map_err(|e| usage(format!("--lexicon: {e}")))
}

pub fn load_templates(path: Option<&Path>) -> Result<TemplateRegistry> {
    match path {
        Some(p) => TemplateRegistry::from_file(p).map_err(|e| usage(format!("--templates: {e}"))),
        None => Ok(TemplateRegistry::default()),
    }
}
