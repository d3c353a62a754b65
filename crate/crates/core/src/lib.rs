//! Instruction-tuning data machinery for aspect-based sentiment analysis.
//!
//! The pipeline is: ingest corpora into [`domain::Example`]s, select k-shot
//! subsets ([`fewshot`]), render instruction inputs and templated targets
//! ([`templates`]), emit multi-task training files ([`mtl`]), parse generated
//! text back into tuples ([`parser`]) and score them ([`eval`]).

pub mod domain;
pub mod eval;
pub mod fewshot;
pub mod ingest;
pub mod literal;
pub mod mtl;
pub mod parser;
pub mod records;
pub mod rng;
pub mod templates;

pub use domain::{
    applicable_tasks, project, AspectTerm, Capabilities, Category, DomainError, Element, Example,
    Quad, Sentiment, Task, Tuple,
};
pub use eval::{score, ScoreOptions, ScoreReport};
pub use fewshot::{sample_fewshot, FewShotSpec, Stratum};
pub use ingest::{load_dataset, Dataset, Format, Split};
pub use mtl::{emit_corpus, EmitConfig, Mode, TrainRecord};
pub use parser::{parse_prediction, parse_segment, split_ssep, CategoryVocab, ParseOutcome};
pub use templates::{render_input, render_target, SentimentLexicon, TemplateRegistry};

/// Separator token between per-tuple renderings in a target.
pub const SSEP: &str = "[SSEP]";

/// Exact joiner used when rendering targets.
pub const SSEP_JOINER: &str = " [SSEP] ";
