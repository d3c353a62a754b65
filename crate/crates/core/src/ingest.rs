//! Corpus ingestion and the canonical interchange format.
//!
//! Two upstream `.txt` layouts are read, both `<sentence>####<annotations>`:
//!
//! * quad: `[['aspect', 'category', 'sentiment', 'opinion'], ...]`, where
//!   aspect or opinion may be `NULL` and the category is either
//!   `ENTITY#ATTRIBUTE` or space-joined words;
//! * aste: `[([aspect idx], [opinion idx], 'POS'|'NEG'|'NEU'), ...]` over
//!   whitespace tokens of the sentence.
//!
//! The canonical format is JSON lines: a header line carrying the schema
//! version, dataset name, split and capabilities, then one example per line.
//! See `docs/formats.md` for the grammar.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{normalize_ws, AspectTerm, Capabilities, Category, Example, Quad, Sentiment};
use crate::literal::{parse_literal, Literal};
use crate::SSEP;

pub const CANONICAL_FORMAT: &str = "absa-forge/canonical";
pub const CANONICAL_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line_no}: malformed line: {reason}")]
    MalformedLine { line_no: usize, reason: String },
    #[error("line {line_no}: token index {index} out of range ({token_count} tokens)")]
    IndexOutOfRange {
        line_no: usize,
        index: i64,
        token_count: usize,
    },
    #[error("line {line_no}: duplicate example id `{id}`")]
    DuplicateId { line_no: usize, id: String },
    #[error("bad canonical header: {0}")]
    BadHeader(String),
    #[error("{} malformed line(s); first: {}", .0.len(), .0[0])]
    Lines(Vec<IngestError>),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl IngestError {
    pub fn line_no(&self) -> Option<usize> {
        match self {
            IngestError::MalformedLine { line_no, .. }
            | IngestError::IndexOutOfRange { line_no, .. }
            | IngestError::DuplicateId { line_no, .. } => Some(*line_no),
            _ => None,
        }
    }
}

fn malformed(line_no: usize, reason: impl Into<String>) -> IngestError {
    IngestError::MalformedLine {
        line_no,
        reason: reason.into(),
    }
}

/// A non-fatal ingestion finding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestWarning {
    pub line_no: usize,
    pub message: String,
}

impl fmt::Display for IngestWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line_no, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }

    /// Guesses the split from a file name such as `rest15_dev.txt`.
    pub fn infer(path: &Path) -> Option<Split> {
        let stem = path.file_stem()?.to_str()?.to_lowercase();
        stem.split(|c: char| !c.is_ascii_alphanumeric())
            .find_map(|part| part.parse().ok())
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "dev" | "valid" | "validation" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub name: String,
    pub split: Split,
    pub examples: Vec<Example>,
    pub category_vocab: BTreeSet<Category>,
    pub capabilities: Capabilities,
}

impl Dataset {
    /// Builds a dataset and derives its category vocabulary from the examples.
    pub fn new(
        name: impl Into<String>,
        split: Split,
        examples: Vec<Example>,
        capabilities: Capabilities,
    ) -> Self {
        let category_vocab = examples
            .iter()
            .flat_map(|e| e.quads.iter().filter_map(|q| q.category.clone()))
            .collect();
        Dataset {
            name: name.into(),
            split,
            examples,
            category_vocab,
            capabilities,
        }
    }

    pub fn quad_count(&self) -> usize {
        self.examples.iter().map(|e| e.quads.len()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Quad,
    Aste,
    Canonical,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_lowercase().as_str() {
            "quad" => Ok(Format::Quad),
            "aste" => Ok(Format::Aste),
            "canonical" => Ok(Format::Canonical),
            other => Err(format!("unknown format `{other}` (quad, aste, canonical)")),
        }
    }
}

fn split_line(line: &str, line_no: usize) -> Result<(String, &str), IngestError> {
    let (sentence, annotations) = line
        .split_once("####")
        .ok_or_else(|| malformed(line_no, "missing `####` separator"))?;
    let text = normalize_ws(sentence);
    if text.is_empty() {
        return Err(malformed(line_no, "empty sentence"));
    }
    Ok((text, annotations))
}

fn annotation_items(raw: &str, line_no: usize) -> Result<Vec<Literal>, IngestError> {
    match parse_literal(raw).map_err(|e| malformed(line_no, e))? {
        Literal::List(items) => Ok(items),
        _ => Err(malformed(line_no, "annotations must be a bracketed list")),
    }
}

fn term(raw: &str, what: &str, line_no: usize) -> Result<String, IngestError> {
    let text = normalize_ws(raw);
    if text.is_empty() {
        return Err(malformed(line_no, format!("empty {what}")));
    }
    if text.contains(SSEP) {
        return Err(malformed(line_no, format!("{what} contains the reserved token {SSEP}")));
    }
    Ok(text)
}

/// Parses one line of the quad layout. The example id is `<split>:<line_no>`.
pub fn parse_quad_line(line: &str, line_no: usize, split: Split) -> Result<Example, IngestError> {
    let (text, raw) = split_line(line, line_no)?;
    let mut quads = Vec::new();
    for item in annotation_items(raw, line_no)? {
        let fields: Vec<&str> = item
            .items()
            .ok_or_else(|| malformed(line_no, "each annotation must be a list"))?
            .iter()
            .map(|f| f.as_str().ok_or_else(|| malformed(line_no, "annotation fields must be strings")))
            .collect::<Result<_, _>>()?;
        let [aspect, category, sentiment, opinion] = fields[..] else {
            return Err(malformed(
                line_no,
                format!("expected 4 fields per annotation, found {}", fields.len()),
            ));
        };
        let aspect = match aspect.trim() {
            "NULL" => AspectTerm::Implicit,
            a => AspectTerm::Explicit(term(a, "aspect term", line_no)?),
        };
        let category_text = term(category, "aspect category", line_no)?;
        if category_text == "NULL" {
            return Err(malformed(line_no, "category may not be NULL"));
        }
        let category = Category::parse(&category_text).map_err(|e| malformed(line_no, e.to_string()))?;
        let sentiment = sentiment
            .trim()
            .parse::<Sentiment>()
            .map_err(|e| malformed(line_no, e.to_string()))?;
        let opinion = match opinion.trim() {
            "NULL" => None,
            o => Some(term(o, "opinion term", line_no)?),
        };
        quads.push(Quad::new(aspect, Some(category), opinion, sentiment));
    }
    Ok(Example {
        id: format!("{split}:{line_no}"),
        text,
        quads,
    })
}

/// Parses one line of the aste layout.
///
/// Non-contiguous index lists are accepted and reported as warnings; the
/// covered tokens are joined with single spaces.
pub fn parse_aste_line(
    line: &str,
    line_no: usize,
    split: Split,
) -> Result<(Example, Vec<IngestWarning>), IngestError> {
    let (text, raw) = split_line(line, line_no)?;
    let tokens: Vec<&str> = text.split(' ').collect();
    let mut warnings = Vec::new();
    let mut quads = Vec::new();

    let span = |lit: &Literal, what: &str, warnings: &mut Vec<IngestWarning>| {
        let indices: Vec<i64> = lit
            .items()
            .ok_or_else(|| malformed(line_no, format!("{what} indices must be a list")))?
            .iter()
            .map(|i| i.as_int().ok_or_else(|| malformed(line_no, format!("{what} index must be an integer"))))
            .collect::<Result<_, _>>()?;
        if indices.is_empty() {
            return Err(malformed(line_no, format!("empty {what} index list")));
        }
        if indices.windows(2).any(|w| w[1] <= w[0]) {
            return Err(malformed(line_no, format!("{what} indices are not strictly increasing")));
        }
        for &i in &indices {
            if i < 0 || i as usize >= tokens.len() {
                return Err(IngestError::IndexOutOfRange {
                    line_no,
                    index: i,
                    token_count: tokens.len(),
                });
            }
        }
        if indices.windows(2).any(|w| w[1] != w[0] + 1) {
            warnings.push(IngestWarning {
                line_no,
                message: format!("non-contiguous {what} span {indices:?}"),
            });
        }
        let joined = indices
            .iter()
            .map(|&i| tokens[i as usize])
            .collect::<Vec<_>>()
            .join(" ");
        term(&joined, what, line_no)
    };

    for item in annotation_items(raw, line_no)? {
        let fields = item
            .items()
            .ok_or_else(|| malformed(line_no, "each triplet must be a tuple"))?;
        let [aspect, opinion, label] = fields else {
            return Err(malformed(
                line_no,
                format!("expected 3 fields per triplet, found {}", fields.len()),
            ));
        };
        let aspect = span(aspect, "aspect term", &mut warnings)?;
        let opinion = span(opinion, "opinion term", &mut warnings)?;
        let sentiment = match label.as_str() {
            Some("POS") => Sentiment::Positive,
            Some("NEG") => Sentiment::Negative,
            Some("NEU") => Sentiment::Neutral,
            Some(other) => return Err(malformed(line_no, format!("unknown sentiment label `{other}`"))),
            None => return Err(malformed(line_no, "sentiment label must be a string")),
        };
        quads.push(Quad::new(
            AspectTerm::Explicit(aspect),
            None,
            Some(opinion),
            sentiment,
        ));
    }
    Ok((
        Example {
            id: format!("{split}:{line_no}"),
            text,
            quads,
        },
        warnings,
    ))
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Defaults to the split inferred from the file name, else `train`.
    pub split: Option<Split>,
    /// Defaults to the file stem.
    pub name: Option<String>,
    /// Skip and count malformed lines instead of failing.
    pub lenient: bool,
}

#[derive(Debug)]
pub struct Loaded {
    pub dataset: Dataset,
    pub warnings: Vec<IngestWarning>,
    /// Malformed lines skipped under `lenient`, in file order.
    pub skipped: Vec<IngestError>,
}

pub fn load_dataset(path: &Path, format: Format, opts: &LoadOptions) -> Result<Loaded, IngestError> {
    let content = fs::read_to_string(path)?;
    let split = opts
        .split
        .or_else(|| Split::infer(path))
        .unwrap_or(Split::Train);
    let name = opts.name.clone().unwrap_or_else(|| {
        path.file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("dataset")
            .to_string()
    });
    match format {
        Format::Canonical => read_canonical_str(&content, opts.lenient),
        Format::Quad | Format::Aste => {
            let mut examples = Vec::new();
            let mut warnings = Vec::new();
            let mut errors = Vec::new();
            for (idx, line) in content.lines().enumerate() {
                let line_no = idx + 1;
                if line.trim().is_empty() {
                    continue;
                }
                let parsed = match format {
                    Format::Quad => parse_quad_line(line, line_no, split).map(|e| (e, Vec::new())),
                    _ => parse_aste_line(line, line_no, split),
                };
                match parsed {
                    Ok((ex, w)) => {
                        examples.push(ex);
                        warnings.extend(w);
                    }
                    Err(e) => errors.push(e),
                }
            }
            if !errors.is_empty() && !opts.lenient {
                return Err(IngestError::Lines(errors));
            }
            let capabilities = Capabilities {
                has_category: format == Format::Quad,
                has_opinion: true,
            };
            Ok(Loaded {
                dataset: Dataset::new(name, split, examples, capabilities),
                warnings,
                skipped: errors,
            })
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    name: String,
    split: Split,
    capabilities: Capabilities,
}

#[derive(Debug, Serialize, Deserialize)]
struct ExampleRecord {
    id: String,
    text: String,
    quads: Vec<QuadRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
struct QuadRecord {
    aspect: Option<String>,
    category: Option<String>,
    sentiment: Sentiment,
    opinion: Option<String>,
}

impl From<&Example> for ExampleRecord {
    fn from(e: &Example) -> Self {
        ExampleRecord {
            id: e.id.clone(),
            text: e.text.clone(),
            quads: e
                .quads
                .iter()
                .map(|q| QuadRecord {
                    aspect: q.aspect.text().map(str::to_string),
                    category: q.category.as_ref().map(|c| c.surface().to_string()),
                    sentiment: q.sentiment,
                    opinion: q.opinion.clone(),
                })
                .collect(),
        }
    }
}

impl ExampleRecord {
    fn into_example(self, line_no: usize) -> Result<Example, IngestError> {
        let text = normalize_ws(&self.text);
        if text.is_empty() {
            return Err(malformed(line_no, "empty sentence"));
        }
        let quads = self
            .quads
            .into_iter()
            .map(|q| {
                Ok(Quad {
                    aspect: match q.aspect {
                        Some(a) => AspectTerm::Explicit(term(&a, "aspect term", line_no)?),
                        None => AspectTerm::Implicit,
                    },
                    category: q
                        .category
                        .map(|c| {
                            let c = term(&c, "aspect category", line_no)?;
                            Category::from_surface(&c).map_err(|e| malformed(line_no, e.to_string()))
                        })
                        .transpose()?,
                    opinion: q.opinion.map(|o| term(&o, "opinion term", line_no)).transpose()?,
                    sentiment: q.sentiment,
                })
            })
            .collect::<Result<_, IngestError>>()?;
        Ok(Example {
            id: self.id,
            text,
            quads,
        })
    }
}

/// Serializes a dataset in the canonical format.
pub fn write_canonical_to<W: Write>(dataset: &Dataset, mut out: W) -> io::Result<()> {
    let header = Header {
        format: CANONICAL_FORMAT.to_string(),
        version: CANONICAL_VERSION,
        name: dataset.name.clone(),
        split: dataset.split,
        capabilities: dataset.capabilities,
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    for example in &dataset.examples {
        serde_json::to_writer(&mut out, &ExampleRecord::from(example))?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn write_canonical(dataset: &Dataset, path: &Path) -> io::Result<()> {
    write_canonical_to(dataset, BufWriter::new(fs::File::create(path)?))
}

pub fn read_canonical(path: &Path) -> Result<Dataset, IngestError> {
    read_canonical_str(&fs::read_to_string(path)?, false).map(|l| l.dataset)
}

pub fn read_canonical_str(content: &str, lenient: bool) -> Result<Loaded, IngestError> {
    let mut lines = content.lines().enumerate();
    let header_line = lines
        .next()
        .map(|(_, l)| l)
        .ok_or_else(|| IngestError::BadHeader("empty file".into()))?;
    let header: Header =
        serde_json::from_str(header_line).map_err(|e| IngestError::BadHeader(e.to_string()))?;
    if header.format != CANONICAL_FORMAT {
        return Err(IngestError::BadHeader(format!(
            "format `{}` is not `{CANONICAL_FORMAT}`",
            header.format
        )));
    }
    if header.version != CANONICAL_VERSION {
        return Err(IngestError::BadHeader(format!(
            "unsupported version {} (expected {CANONICAL_VERSION})",
            header.version
        )));
    }
    let mut examples = Vec::new();
    let mut errors = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<ExampleRecord>(line)
            .map_err(|e| malformed(line_no, e.to_string()))
            .and_then(|r| r.into_example(line_no))
            .and_then(|ex| {
                if seen.insert(ex.id.clone()) {
                    Ok(ex)
                } else {
                    Err(IngestError::DuplicateId { line_no, id: ex.id })
                }
            });
        match parsed {
            Ok(ex) => examples.push(ex),
            Err(e) => errors.push(e),
        }
    }
    if !errors.is_empty() && !lenient {
        return Err(IngestError::Lines(errors));
    }
    Ok(Loaded {
        dataset: Dataset::new(header.name, header.split, examples, header.capabilities),
        warnings: Vec::new(),
        skipped: errors,
    })
}
