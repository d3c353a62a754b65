//! Line-delimited prediction and parsed-tuple files exchanged with the
//! external trainer.
//!
//! * predictions: `{"id", "task", "generated"}` per line, written by the
//!   generation step;
//! * parsed: `{"id", "task", "tuples", "malformed_count", "malformed",
//!   "raw_segment_count"}` per line, written by `parse`.

use std::collections::HashSet;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{AspectTerm, Sentiment, Task, Tuple};
use crate::parser::{Malformed, ParseOutcome};

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("line {line_no}: {message}")]
    Schema { line_no: usize, message: String },
    #[error("line {line_no}: duplicate record for ({id}, {task})")]
    Duplicate { line_no: usize, id: String, task: Task },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionRecord {
    pub id: String,
    pub task: Task,
    pub generated: String,
}

/// A tuple on disk. `aspect: null` is an implicit aspect; elements outside
/// the task mask are omitted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleRecord {
    pub aspect: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opinion: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentiment: Option<Sentiment>,
}

impl From<&Tuple> for TupleRecord {
    fn from(t: &Tuple) -> Self {
        TupleRecord {
            aspect: t.aspect.text().map(str::to_string),
            category: t.category.clone(),
            opinion: t.opinion.clone(),
            sentiment: t.sentiment,
        }
    }
}

impl From<TupleRecord> for Tuple {
    fn from(r: TupleRecord) -> Self {
        Tuple {
            aspect: r.aspect.map_or(AspectTerm::Implicit, AspectTerm::Explicit),
            category: r.category,
            opinion: r.opinion,
            sentiment: r.sentiment,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParsedRecord {
    pub id: String,
    pub task: Task,
    pub tuples: Vec<TupleRecord>,
    pub malformed_count: usize,
    #[serde(default)]
    pub malformed: Vec<Malformed>,
    pub raw_segment_count: usize,
    #[serde(default)]
    pub implicit_aspects: usize,
}

impl ParsedRecord {
    pub fn new(id: impl Into<String>, outcome: &ParseOutcome) -> Self {
        ParsedRecord {
            id: id.into(),
            task: outcome.task,
            tuples: outcome.tuples.iter().map(TupleRecord::from).collect(),
            malformed_count: outcome.malformed.len(),
            malformed: outcome.malformed.clone(),
            raw_segment_count: outcome.raw_segment_count,
            implicit_aspects: outcome.implicit_aspects,
        }
    }

    pub fn to_outcome(&self) -> ParseOutcome {
        ParseOutcome {
            task: self.task,
            tuples: self.tuples.iter().cloned().map(Tuple::from).collect(),
            malformed: self.malformed.clone(),
            raw_segment_count: self.raw_segment_count,
            implicit_aspects: self.implicit_aspects,
        }
    }
}

/// Parses JSON lines, skipping blank lines and rejecting duplicate
/// `(id, task)` keys.
fn read_lines<T, K>(content: &str, key: K) -> Result<Vec<T>, RecordError>
where
    T: serde::de::DeserializeOwned,
    K: Fn(&T) -> (String, Task),
{
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: T = serde_json::from_str(line).map_err(|e| RecordError::Schema {
            line_no,
            message: e.to_string(),
        })?;
        let (id, task) = key(&rec);
        if !seen.insert((id.clone(), task)) {
            return Err(RecordError::Duplicate { line_no, id, task });
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn read_predictions(content: &str) -> Result<Vec<PredictionRecord>, RecordError> {
    read_lines(content, |r: &PredictionRecord| (r.id.clone(), r.task))
}

pub fn read_parsed(content: &str) -> Result<Vec<ParsedRecord>, RecordError> {
    read_lines(content, |r: &ParsedRecord| (r.id.clone(), r.task))
}

pub fn write_lines<T: Serialize, W: Write>(records: &[T], mut out: W) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}
