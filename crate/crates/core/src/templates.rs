//! Instruction prompts and templated targets.
//!
//! Inputs are rendered by substituting the sentence into one of a task's
//! instruction patterns. Targets render each quad with the task's clause
//! template and join them with [`SSEP_JOINER`]:
//!
//! | task | clause                              |
//! |------|-------------------------------------|
//! | AE   | `{AT}`                              |
//! | AESC | `{AT} is {S}`                       |
//! | TASD | `{AT} is {S} means {AC} is {S}`     |
//! | ASTE | `{AT} is {OT} means it is {S}`      |
//! | ASQP | `{AT} is {OT} means {AC} is {S}`    |
//!
//! `{S}` is the lexicon word for the polarity and an implicit aspect renders
//! as `it`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand_chacha::rand_core::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{project, AspectTerm, DomainError, Example, Sentiment, Task};
use crate::rng::uniform_below;
use crate::SSEP_JOINER;

pub const TEXT_PLACEHOLDER: &str = "$TEXT";

/// Word an implicit aspect renders as.
pub const IMPLICIT_ASPECT: &str = "it";

const DEFAULT_PROMPTS: [(Task, &[&str]); 5] = [
    (
        Task::Ae,
        &[
            "Given the text: $TEXT, what are the aspect terms in it ?",
            "What are the aspect terms in the text: $TEXT ?",
        ],
    ),
    (
        Task::Aesc,
        &[
            "Given the text: $TEXT, what are the aspect terms and their sentiments ?",
            "What are the aspect terms and their sentiments in the text: $TEXT ?",
        ],
    ),
    (
        Task::Tasd,
        &[
            "Given the text: $TEXT, what are the aspect terms, sentiments and categories ?",
            "What are the aspect terms, sentiments and categories in the text: $TEXT ?",
            "Given the text: $TEXT, what are the aspect terms, categories and sentiments ?",
            "What are the aspect terms, categories and sentiments in the text: $TEXT ?",
        ],
    ),
    (
        Task::Aste,
        &[
            "Given the text: $TEXT, what are the aspect terms, opinion terms and sentiments ?",
            "What are the aspect terms, opinion terms and sentiments in the text: $TEXT ?",
            "Given the text: $TEXT, what are the opinion terms, aspect terms and sentiments ?",
            "What are the opinion terms, aspect terms and sentiments in the text: $TEXT ?",
        ],
    ),
    (
        Task::Asqp,
        &[
            "Given the text: $TEXT, what are the aspect terms, opinion terms, sentiments and categories ?",
            "What are the aspect terms, opinion terms, sentiments and categories in the text: $TEXT ?",
            "Given the text: $TEXT, what are the aspect terms, opinion terms, categories and sentiments ?",
            "What are the aspect terms, opinion terms, categories and sentiments in the text: $TEXT ?",
            "Given the text: $TEXT, what are the opinion terms, aspect terms, sentiments and categories ?",
            "What are the opinion terms, aspect terms, sentiments and categories in the text: $TEXT ?",
            "Given the text: $TEXT, what are the opinion terms, aspect terms, categories and sentiments ?",
            "What are the opinion terms, aspect terms, categories and sentiments in the text: $TEXT ?",
        ],
    ),
];

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("template index {index} out of range for {task} ({size} templates)")]
    IndexOutOfRange { task: Task, index: usize, size: usize },
    #[error("{task} template {index} must contain `$TEXT` exactly once: {pattern:?}")]
    BadPattern { task: Task, index: usize, pattern: String },
    #[error("{0} has an empty template list")]
    EmptyInventory(Task),
    #[error("invalid sentiment lexicon: {0}")]
    BadLexicon(String),
    #[error(transparent)]
    Missing(#[from] DomainError),
    #[error("template file: {0}")]
    File(String),
}

/// One instruction pattern of a task.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PromptTemplate<'a> {
    pub task: Task,
    pub index: usize,
    pub pattern: &'a str,
}

/// Per-task ordered instruction patterns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TemplateRegistry {
    patterns: BTreeMap<Task, Vec<String>>,
}

impl Default for TemplateRegistry {
    fn default() -> Self {
        TemplateRegistry {
            patterns: DEFAULT_PROMPTS
                .iter()
                .map(|(t, ps)| (*t, ps.iter().map(|p| p.to_string()).collect()))
                .collect(),
        }
    }
}

impl TemplateRegistry {
    /// Default registry with the tasks present in `overrides` replaced.
    pub fn with_overrides(overrides: BTreeMap<Task, Vec<String>>) -> Result<Self, TemplateError> {
        let mut reg = Self::default();
        for (task, patterns) in overrides {
            if patterns.is_empty() {
                return Err(TemplateError::EmptyInventory(task));
            }
            for (index, p) in patterns.iter().enumerate() {
                if p.matches(TEXT_PLACEHOLDER).count() != 1 {
                    return Err(TemplateError::BadPattern {
                        task,
                        index,
                        pattern: p.clone(),
                    });
                }
            }
            reg.patterns.insert(task, patterns);
        }
        Ok(reg)
    }

    /// Loads a JSON object mapping task names to pattern lists.
    pub fn from_file(path: &Path) -> Result<Self, TemplateError> {
        let text = fs::read_to_string(path).map_err(|e| TemplateError::File(e.to_string()))?;
        let overrides: BTreeMap<Task, Vec<String>> =
            serde_json::from_str(&text).map_err(|e| TemplateError::File(e.to_string()))?;
        Self::with_overrides(overrides)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("registry serializes")
    }

    pub fn size(&self, task: Task) -> usize {
        self.patterns.get(&task).map_or(0, Vec::len)
    }

    pub fn templates(&self, task: Task) -> impl Iterator<Item = PromptTemplate<'_>> {
        self.patterns
            .get(&task)
            .into_iter()
            .flatten()
            .enumerate()
            .map(move |(index, p)| PromptTemplate {
                task,
                index,
                pattern: p,
            })
    }

    pub fn get(&self, task: Task, index: usize) -> Result<PromptTemplate<'_>, TemplateError> {
        self.templates(task)
            .nth(index)
            .ok_or(TemplateError::IndexOutOfRange {
                task,
                index,
                size: self.size(task),
            })
    }

    pub fn render_input(&self, text: &str, task: Task, index: usize) -> Result<String, TemplateError> {
        Ok(self.get(task, index)?.pattern.replacen(TEXT_PLACEHOLDER, text, 1))
    }

    /// Uniform template index for `task`, drawn from the caller's rng.
    pub fn sample_template<R: RngCore + ?Sized>(&self, task: Task, rng: &mut R) -> usize {
        let size = self.size(task);
        assert!(size > 0, "registry has no templates for {task}");
        uniform_below(rng, size as u64) as usize
    }
}

/// Renders `text` with the built-in registry.
pub fn render_input(text: &str, task: Task, index: usize) -> Result<String, TemplateError> {
    TemplateRegistry::default().render_input(text, task, index)
}

/// Polarity to target word, and back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentimentLexicon {
    words: [String; 3],
}

impl Default for SentimentLexicon {
    fn default() -> Self {
        SentimentLexicon {
            words: ["great".into(), "bad".into(), "ok".into()],
        }
    }
}

fn slot(s: Sentiment) -> usize {
    match s {
        Sentiment::Positive => 0,
        Sentiment::Negative => 1,
        Sentiment::Neutral => 2,
    }
}

impl SentimentLexicon {
    /// Words must be distinct single tokens and must not collide with the
    /// template keywords.
    pub fn new(positive: &str, negative: &str, neutral: &str) -> Result<Self, TemplateError> {
        let words = [positive, negative, neutral];
        for w in words {
            if w.is_empty() || w.split_whitespace().count() != 1 || w.trim() != w {
                return Err(TemplateError::BadLexicon(format!("`{w}` is not a single token")));
            }
            if ["is", "means", IMPLICIT_ASPECT].contains(&w) || w.contains(crate::SSEP) {
                return Err(TemplateError::BadLexicon(format!("`{w}` is reserved")));
            }
        }
        if words[0] == words[1] || words[1] == words[2] || words[0] == words[2] {
            return Err(TemplateError::BadLexicon("words must be distinct".into()));
        }
        Ok(SentimentLexicon {
            words: words.map(str::to_string),
        })
    }

    pub fn forward(&self, s: Sentiment) -> &str {
        &self.words[slot(s)]
    }

    pub fn reverse(&self, word: &str) -> Option<Sentiment> {
        Sentiment::ALL.into_iter().find(|&s| self.forward(s) == word)
    }
}

/// The clause for one quad under `task`.
fn render_clause(quad: &crate::domain::Quad, task: Task, lexicon: &SentimentLexicon) -> Result<String, DomainError> {
    let tuple = project(quad, task)?;
    let aspect = match &tuple.aspect {
        AspectTerm::Explicit(t) => t.as_str(),
        AspectTerm::Implicit => IMPLICIT_ASPECT,
    };
    let sw = lexicon.forward(quad.sentiment);
    let category = tuple.category.as_deref().unwrap_or_default();
    let opinion = tuple.opinion.as_deref().unwrap_or_default();
    Ok(match task {
        Task::Ae => aspect.to_string(),
        Task::Aesc => format!("{aspect} is {sw}"),
        Task::Tasd => format!("{aspect} is {sw} means {category} is {sw}"),
        Task::Aste => format!("{aspect} is {opinion} means {IMPLICIT_ASPECT} is {sw}"),
        Task::Asqp => format!("{aspect} is {opinion} means {category} is {sw}"),
    })
}

/// Target sequence for `example` under `task`, quads in annotation order.
pub fn render_target(example: &Example, task: Task, lexicon: &SentimentLexicon) -> Result<String, DomainError> {
    let clauses = example
        .quads
        .iter()
        .map(|q| render_clause(q, task, lexicon))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(clauses.join(SSEP_JOINER))
}
