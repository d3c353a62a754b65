//! Training and evaluation corpus emission for the `text`, `it` and `it-mtl`
//! configurations.
//!
//! For `it-mtl` every example is paired with every selected task, so each
//! task contributes exactly `|examples|` records. A trainer reading the
//! emitted file in order and averaging token-level negative log-likelihood
//! over records therefore optimizes
//!
//! ```text
//! L = -(1/T) * sum_t sum_i log p(y_i | y_<i, x_t)
//! ```
//!
//! with uniform task weight `1/T`. Record order is a seeded shuffle of the
//! example × task product, which mixes tasks within batches.

use std::fmt;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{applicable_tasks, DomainError, Task};
use crate::ingest::Dataset;
use crate::rng::{seeded, shuffle, Stream};
use crate::templates::{render_target, SentimentLexicon, TemplateError, TemplateRegistry};

pub const CORPUS_FORMAT: &str = "absa-forge/mtl";
pub const CORPUS_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "text")]
    Text,
    #[serde(rename = "it")]
    It,
    #[serde(rename = "it-mtl")]
    ItMtl,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_lowercase().as_str() {
            "text" => Ok(Mode::Text),
            "it" => Ok(Mode::It),
            "it-mtl" | "it_mtl" | "itmtl" => Ok(Mode::ItMtl),
            other => Err(format!("unknown mode `{other}` (text, it, it-mtl)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Text => "text",
            Mode::It => "it",
            Mode::ItMtl => "it-mtl",
        })
    }
}

/// How instruction templates are chosen per record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TemplatePolicy {
    Fixed(usize),
    Random,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmitConfig {
    pub mode: Mode,
    pub tasks: Vec<Task>,
    pub seed: u64,
    /// Mixed into the rng streams so each epoch draws fresh templates and order.
    pub epoch: u64,
    pub template_policy: TemplatePolicy,
    /// Drop (example, task) pairs whose quads lack a masked element instead
    /// of failing.
    pub skip_incomplete: bool,
}

impl EmitConfig {
    /// Training emission: random templates.
    pub fn train(mode: Mode, tasks: Vec<Task>, seed: u64) -> Self {
        EmitConfig {
            mode,
            tasks,
            seed,
            epoch: 0,
            template_policy: TemplatePolicy::Random,
            skip_incomplete: false,
        }
    }

    /// Evaluation emission: template 0 for every record.
    pub fn eval(mode: Mode, tasks: Vec<Task>, seed: u64) -> Self {
        EmitConfig {
            template_policy: TemplatePolicy::Fixed(0),
            ..Self::train(mode, tasks, seed)
        }
    }
}

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("tasks not applicable to dataset `{dataset}`: {}", join_tasks(.tasks))]
    InapplicableTask { dataset: String, tasks: Vec<Task> },
    #[error("invalid emit config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error("example `{id}`: {source}")]
    Incomplete { id: String, source: DomainError },
    #[error("corpus file: {0}")]
    Schema(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn join_tasks(tasks: &[Task]) -> String {
    tasks.iter().map(|t| t.name()).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainRecord {
    #[serde(rename = "id")]
    pub example_id: String,
    pub task: Task,
    /// `-1` in text mode.
    pub template_index: i64,
    pub input: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusHeader {
    pub format: String,
    pub version: u32,
    pub mode: Mode,
    pub tasks: Vec<Task>,
    pub seed: u64,
    pub epoch: u64,
    pub records: usize,
    pub objective: String,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub header: CorpusHeader,
    pub records: Vec<TrainRecord>,
    /// (example id, task) pairs dropped under `skip_incomplete`.
    pub skipped: Vec<(String, Task)>,
}

pub fn emit_corpus(
    dataset: &Dataset,
    config: &EmitConfig,
    registry: &TemplateRegistry,
    lexicon: &SentimentLexicon,
) -> Result<Corpus, EmitError> {
    let tasks = &config.tasks;
    if tasks.is_empty() {
        return Err(EmitError::InvalidConfig("no tasks selected".into()));
    }
    if (1..tasks.len()).any(|i| tasks[..i].contains(&tasks[i])) {
        return Err(EmitError::InvalidConfig("duplicate task".into()));
    }
    match config.mode {
        Mode::ItMtl if tasks.len() < 2 => {
            return Err(EmitError::InvalidConfig("it-mtl needs at least two tasks".into()))
        }
        Mode::Text | Mode::It if tasks.len() != 1 => {
            return Err(EmitError::InvalidConfig(format!(
                "{} mode takes exactly one task",
                config.mode
            )))
        }
        _ => {}
    }
    let applicable = applicable_tasks(dataset.capabilities);
    let inapplicable: Vec<Task> = tasks.iter().copied().filter(|t| !applicable.contains(t)).collect();
    if !inapplicable.is_empty() {
        return Err(EmitError::InapplicableTask {
            dataset: dataset.name.clone(),
            tasks: inapplicable,
        });
    }
    if let TemplatePolicy::Fixed(index) = config.template_policy {
        if config.mode != Mode::Text {
            for &task in tasks {
                registry.get(task, index)?;
            }
        }
    }

    let mut template_rng = seeded(config.seed, Stream::Templates, config.epoch);
    let mut records = Vec::with_capacity(dataset.examples.len() * tasks.len());
    let mut skipped = Vec::new();
    for example in &dataset.examples {
        for &task in tasks {
            let target = match render_target(example, task, lexicon) {
                Ok(t) => t,
                Err(_) if config.skip_incomplete => {
                    skipped.push((example.id.clone(), task));
                    continue;
                }
                Err(source) => {
                    return Err(EmitError::Incomplete {
                        id: example.id.clone(),
                        source,
                    })
                }
            };
            let (template_index, input) = match config.mode {
                Mode::Text => (-1, example.text.clone()),
                Mode::It | Mode::ItMtl => {
                    let index = match config.template_policy {
                        TemplatePolicy::Fixed(i) => i,
                        TemplatePolicy::Random => registry.sample_template(task, &mut template_rng),
                    };
                    (index as i64, registry.render_input(&example.text, task, index)?)
                }
            };
            records.push(TrainRecord {
                example_id: example.id.clone(),
                task,
                template_index,
                input,
                target,
            });
        }
    }
    shuffle(&mut seeded(config.seed, Stream::RecordOrder, config.epoch), &mut records);

    Ok(Corpus {
        header: CorpusHeader {
            format: CORPUS_FORMAT.into(),
            version: CORPUS_VERSION,
            mode: config.mode,
            tasks: tasks.clone(),
            seed: config.seed,
            epoch: config.epoch,
            records: records.len(),
            objective: "mean token NLL of target given input, uniform 1/T task weight".into(),
        },
        records,
        skipped,
    })
}

pub fn write_corpus_to<W: Write>(corpus: &Corpus, mut out: W) -> io::Result<()> {
    serde_json::to_writer(&mut out, &corpus.header)?;
    out.write_all(b"\n")?;
    for r in &corpus.records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn write_corpus(corpus: &Corpus, path: &Path) -> io::Result<()> {
    write_corpus_to(corpus, BufWriter::new(fs::File::create(path)?))
}

/// Reads an emitted corpus, checking the schema header and record count.
pub fn read_corpus_str(content: &str) -> Result<Corpus, EmitError> {
    let mut lines = content.lines();
    let header: CorpusHeader = serde_json::from_str(lines.next().unwrap_or_default())
        .map_err(|e| EmitError::Schema(format!("header: {e}")))?;
    if header.format != CORPUS_FORMAT || header.version != CORPUS_VERSION {
        return Err(EmitError::Schema(format!(
            "expected {CORPUS_FORMAT} v{CORPUS_VERSION}, found {} v{}",
            header.format, header.version
        )));
    }
    let records = lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| EmitError::Schema(format!("line {}: {e}", i + 2)))
        })
        .collect::<Result<Vec<TrainRecord>, _>>()?;
    if records.len() != header.records {
        return Err(EmitError::Schema(format!(
            "header announces {} records, found {}",
            header.records,
            records.len()
        )));
    }
    Ok(Corpus {
        header,
        records,
        skipped: Vec::new(),
    })
}
