//! Shared domain types: sentiment polarity, aspect terms, categories, quads,
//! examples and the five factorized tasks.
//!
//! Strings reaching these types are expected to be canonical already
//! (whitespace collapsed and trimmed). Normalization happens once, at
//! ingestion, through [`normalize_ws`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("unknown sentiment label `{0}` (expected positive, negative or neutral)")]
    UnknownSentiment(String),
    #[error("unknown task `{0}` (expected AE, AESC, TASD, ASTE or ASQP)")]
    UnknownTask(String),
    #[error("empty {0} after whitespace normalization")]
    EmptyTerm(&'static str),
    #[error("task {task} needs the {element} element, which is absent")]
    MissingElement { task: Task, element: Element },
}

/// Collapse internal whitespace runs to a single space and trim.
pub fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sentiment {
    Positive,
    Negative,
    Neutral,
}

impl Sentiment {
    pub const ALL: [Sentiment; 3] = [Sentiment::Positive, Sentiment::Negative, Sentiment::Neutral];

    pub fn as_str(self) -> &'static str {
        match self {
            Sentiment::Positive => "positive",
            Sentiment::Negative => "negative",
            Sentiment::Neutral => "neutral",
        }
    }
}

impl fmt::Display for Sentiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Sentiment {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "positive" => Ok(Sentiment::Positive),
            "negative" => Ok(Sentiment::Negative),
            "neutral" => Ok(Sentiment::Neutral),
            other => Err(DomainError::UnknownSentiment(other.to_string())),
        }
    }
}

/// The opined-about target. `Implicit` stands for a `NULL` annotation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AspectTerm {
    Explicit(String),
    Implicit,
}

impl AspectTerm {
    /// Builds an explicit term from raw text, normalizing whitespace.
    pub fn explicit(raw: &str) -> Result<Self, DomainError> {
        let text = normalize_ws(raw);
        if text.is_empty() {
            return Err(DomainError::EmptyTerm("aspect term"));
        }
        Ok(AspectTerm::Explicit(text))
    }

    pub fn text(&self) -> Option<&str> {
        match self {
            AspectTerm::Explicit(t) => Some(t),
            AspectTerm::Implicit => None,
        }
    }

    pub fn is_implicit(&self) -> bool {
        matches!(self, AspectTerm::Implicit)
    }
}

impl fmt::Display for AspectTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AspectTerm::Explicit(t) => f.write_str(t),
            AspectTerm::Implicit => f.write_str("NULL"),
        }
    }
}

/// A closed-vocabulary aspect category such as `food quality`.
///
/// Only the lowercase surface form is stored. `entity` is its first word and
/// `attribute` the remainder, so categories round-trip through any format
/// that stores the surface.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Category {
    surface: String,
}

impl Category {
    pub fn new(entity: &str, attribute: Option<&str>) -> Result<Self, DomainError> {
        match attribute {
            Some(attr) => Self::from_surface(&format!("{entity} {attr}")),
            None => Self::from_surface(entity),
        }
    }

    /// Accepts both `ENTITY#ATTRIBUTE` and already space-joined words.
    pub fn parse(token: &str) -> Result<Self, DomainError> {
        match token.split_once('#') {
            Some((entity, attr)) => Self::new(entity, Some(attr)),
            None => Self::from_surface(token),
        }
    }

    pub fn from_surface(surface: &str) -> Result<Self, DomainError> {
        let surface = normalize_ws(&surface.to_lowercase());
        if surface.is_empty() {
            return Err(DomainError::EmptyTerm("aspect category"));
        }
        Ok(Category { surface })
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    pub fn entity(&self) -> &str {
        self.surface.split(' ').next().unwrap_or_default()
    }

    pub fn attribute(&self) -> Option<&str> {
        self.surface.split_once(' ').map(|(_, a)| a)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.surface)
    }
}

/// One annotation unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Quad {
    pub aspect: AspectTerm,
    pub category: Option<Category>,
    pub opinion: Option<String>,
    pub sentiment: Sentiment,
}

impl Quad {
    pub fn new(
        aspect: AspectTerm,
        category: Option<Category>,
        opinion: Option<String>,
        sentiment: Sentiment,
    ) -> Self {
        Quad {
            aspect,
            category,
            opinion,
            sentiment,
        }
    }
}

/// A review sentence plus its annotations, in source order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub id: String,
    pub text: String,
    pub quads: Vec<Quad>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Element {
    #[serde(rename = "AT")]
    AspectTerm,
    #[serde(rename = "AC")]
    AspectCategory,
    #[serde(rename = "S")]
    Sentiment,
    #[serde(rename = "OT")]
    OpinionTerm,
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Element::AspectTerm => "aspect term",
            Element::AspectCategory => "aspect category",
            Element::Sentiment => "sentiment",
            Element::OpinionTerm => "opinion term",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Task {
    #[serde(rename = "AE")]
    Ae,
    #[serde(rename = "AESC", alias = "ASE")]
    Aesc,
    #[serde(rename = "TASD")]
    Tasd,
    #[serde(rename = "ASTE")]
    Aste,
    #[serde(rename = "ASQP")]
    Asqp,
}

impl Task {
    pub const ALL: [Task; 5] = [Task::Ae, Task::Aesc, Task::Tasd, Task::Aste, Task::Asqp];

    /// Elements each task predicts.
    pub fn mask(self) -> &'static [Element] {
        use Element::*;
        match self {
            Task::Ae => &[AspectTerm],
            Task::Aesc => &[AspectTerm, Sentiment],
            Task::Tasd => &[AspectTerm, AspectCategory, Sentiment],
            Task::Aste => &[AspectTerm, Sentiment, OpinionTerm],
            Task::Asqp => &[AspectTerm, AspectCategory, Sentiment, OpinionTerm],
        }
    }

    pub fn has(self, element: Element) -> bool {
        self.mask().contains(&element)
    }

    pub fn name(self) -> &'static str {
        match self {
            Task::Ae => "AE",
            Task::Aesc => "AESC",
            Task::Tasd => "TASD",
            Task::Aste => "ASTE",
            Task::Asqp => "ASQP",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = DomainError;

    /// Case-insensitive; `ASE` is accepted as an alias of `AESC`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "AE" => Ok(Task::Ae),
            "AESC" | "ASE" => Ok(Task::Aesc),
            "TASD" => Ok(Task::Tasd),
            "ASTE" => Ok(Task::Aste),
            "ASQP" => Ok(Task::Asqp),
            _ => Err(DomainError::UnknownTask(s.to_string())),
        }
    }
}

/// The masked projection of a quad. Elements outside the task mask are `None`.
///
/// Field order gives the display order `(AT, AC, OT, S)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tuple {
    pub aspect: AspectTerm,
    pub category: Option<String>,
    pub opinion: Option<String>,
    pub sentiment: Option<Sentiment>,
}

impl Tuple {
    /// Lowercased copy, for case-insensitive comparison.
    pub fn casefolded(&self) -> Tuple {
        Tuple {
            aspect: match &self.aspect {
                AspectTerm::Explicit(t) => AspectTerm::Explicit(t.to_lowercase()),
                AspectTerm::Implicit => AspectTerm::Implicit,
            },
            category: self.category.as_ref().map(|c| c.to_lowercase()),
            opinion: self.opinion.as_ref().map(|o| o.to_lowercase()),
            sentiment: self.sentiment,
        }
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.aspect)?;
        if let Some(c) = &self.category {
            write!(f, ", {c}")?;
        }
        if let Some(o) = &self.opinion {
            write!(f, ", {o}")?;
        }
        if let Some(s) = &self.sentiment {
            write!(f, ", {s}")?;
        }
        f.write_str(")")
    }
}

/// Keeps only the elements of `task`'s mask.
pub fn project(quad: &Quad, task: Task) -> Result<Tuple, DomainError> {
    let missing = |element| DomainError::MissingElement { task, element };
    let category = if task.has(Element::AspectCategory) {
        let c = quad
            .category
            .as_ref()
            .ok_or_else(|| missing(Element::AspectCategory))?;
        Some(c.surface().to_string())
    } else {
        None
    };
    let opinion = if task.has(Element::OpinionTerm) {
        Some(
            quad.opinion
                .clone()
                .ok_or_else(|| missing(Element::OpinionTerm))?,
        )
    } else {
        None
    };
    Ok(Tuple {
        aspect: quad.aspect.clone(),
        category,
        opinion,
        sentiment: task.has(Element::Sentiment).then_some(quad.sentiment),
    })
}

/// Which annotation layers a corpus carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Capabilities {
    pub has_category: bool,
    pub has_opinion: bool,
}

/// Tasks whose mask a corpus with `caps` can satisfy, in canonical order.
pub fn applicable_tasks(caps: Capabilities) -> Vec<Task> {
    Task::ALL
        .into_iter()
        .filter(|t| {
            (caps.has_category || !t.has(Element::AspectCategory))
                && (caps.has_opinion || !t.has(Element::OpinionTerm))
        })
        .collect()
}
