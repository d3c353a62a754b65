//! Decoding generated text back into tuples.
//!
//! Output is split on `[SSEP]`, then each segment is parsed right to left
//! against the task's clause template. Anchoring on the closed vocabularies
//! (the sentiment lexicon, the dataset's category surfaces and the literal
//! `it`) lets free-text aspect and opinion terms contain template keywords.
//! Within an `{AT} is {OT}` clause the split happens at the first `is`.
//!
//! Parsing is total: any input string yields a [`ParseOutcome`], with
//! unparseable segments recorded as [`Malformed`] entries.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::domain::{AspectTerm, Category, Element, Sentiment, Task, Tuple};
use crate::templates::{SentimentLexicon, IMPLICIT_ASPECT};
use crate::SSEP;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParseErrorKind {
    NoSentimentWord,
    UnknownCategory,
    MissingMeans,
    MissingIs,
    EmptyTerm,
    SentimentMismatch,
}

impl ParseErrorKind {
    pub fn code(self) -> &'static str {
        match self {
            ParseErrorKind::NoSentimentWord => "no_sentiment_word",
            ParseErrorKind::UnknownCategory => "unknown_category",
            ParseErrorKind::MissingMeans => "missing_means",
            ParseErrorKind::MissingIs => "missing_is",
            ParseErrorKind::EmptyTerm => "empty_term",
            ParseErrorKind::SentimentMismatch => "sentiment_mismatch",
        }
    }
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Malformed {
    pub segment: String,
    pub reason: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseOutcome {
    pub task: Task,
    pub tuples: BTreeSet<Tuple>,
    pub malformed: Vec<Malformed>,
    pub raw_segment_count: usize,
    /// Segments whose aspect decoded from the literal `it`. An explicit
    /// aspect spelled `it` cannot be told apart from an implicit one.
    pub implicit_aspects: usize,
}

impl ParseOutcome {
    pub fn empty(task: Task) -> Self {
        ParseOutcome {
            task,
            tuples: BTreeSet::new(),
            malformed: Vec::new(),
            raw_segment_count: 0,
            implicit_aspects: 0,
        }
    }
}

/// Category surfaces as token sequences, longest first.
#[derive(Debug, Clone, Default)]
pub struct CategoryVocab {
    entries: Vec<Vec<String>>,
}

impl CategoryVocab {
    pub fn new<'a, I: IntoIterator<Item = &'a Category>>(categories: I) -> Self {
        Self::from_surfaces(categories.into_iter().map(Category::surface))
    }

    pub fn from_surfaces<'a, I: IntoIterator<Item = &'a str>>(surfaces: I) -> Self {
        let mut entries: Vec<Vec<String>> = surfaces
            .into_iter()
            .map(|s| s.split_whitespace().map(str::to_string).collect::<Vec<_>>())
            .filter(|t| !t.is_empty())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        entries.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        CategoryVocab { entries }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }
}

/// Splits on the exact token `[SSEP]`, trimming and dropping empty pieces.
pub fn split_ssep(generated: &str) -> Vec<&str> {
    generated
        .split(SSEP)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}

fn join(tokens: &[&str]) -> Result<String, ParseErrorKind> {
    if tokens.is_empty() {
        Err(ParseErrorKind::EmptyTerm)
    } else {
        Ok(tokens.join(" "))
    }
}

fn aspect_of(tokens: &[&str]) -> Result<AspectTerm, ParseErrorKind> {
    let text = join(tokens)?;
    Ok(if text == IMPLICIT_ASPECT {
        AspectTerm::Implicit
    } else {
        AspectTerm::Explicit(text)
    })
}

/// Peels a trailing `is <sentiment word>` off `tokens`.
fn strip_sentiment<'t>(
    tokens: &'t [&'t str],
    lexicon: &SentimentLexicon,
) -> Result<(&'t [&'t str], Sentiment), ParseErrorKind> {
    let (last, rest) = tokens.split_last().ok_or(ParseErrorKind::NoSentimentWord)?;
    let sentiment = lexicon.reverse(last).ok_or(ParseErrorKind::NoSentimentWord)?;
    match rest.split_last() {
        Some((&"is", rest)) => Ok((rest, sentiment)),
        _ => Err(ParseErrorKind::MissingIs),
    }
}

/// Peels a trailing `means <category>`, preferring the longest category.
fn strip_category<'t>(
    tokens: &'t [&'t str],
    vocab: &CategoryVocab,
) -> Result<(&'t [&'t str], String), ParseErrorKind> {
    let mut seen_category = false;
    for entry in &vocab.entries {
        let n = entry.len();
        if tokens.len() < n || !tokens[tokens.len() - n..].iter().zip(entry).all(|(a, b)| a == b) {
            continue;
        }
        seen_category = true;
        if let Some((&"means", left)) = tokens[..tokens.len() - n].split_last() {
            return Ok((left, entry.join(" ")));
        }
    }
    Err(if seen_category {
        ParseErrorKind::MissingMeans
    } else {
        ParseErrorKind::UnknownCategory
    })
}

/// `{AT} is {OT}`, split at the first `is` that has a token before it.
fn split_aspect_opinion(tokens: &[&str]) -> Result<(AspectTerm, String), ParseErrorKind> {
    let Some(at) = tokens.iter().skip(1).position(|&t| t == "is").map(|p| p + 1) else {
        // A leading `is` means the aspect itself is missing.
        return Err(match tokens.first() {
            None | Some(&"is") => ParseErrorKind::EmptyTerm,
            Some(_) => ParseErrorKind::MissingIs,
        });
    };
    Ok((aspect_of(&tokens[..at])?, join(&tokens[at + 1..])?))
}

/// Parses one segment into a tuple of `task`'s arity.
pub fn parse_segment(
    segment: &str,
    task: Task,
    vocab: &CategoryVocab,
    lexicon: &SentimentLexicon,
) -> Result<Tuple, ParseErrorKind> {
    let tokens: Vec<&str> = segment.split_whitespace().collect();
    if task == Task::Ae {
        return Ok(Tuple {
            aspect: aspect_of(&tokens)?,
            category: None,
            opinion: None,
            sentiment: None,
        });
    }

    let (rest, sentiment) = strip_sentiment(&tokens, lexicon)?;
    let (left, category) = match task {
        Task::Tasd | Task::Asqp => {
            let (left, c) = strip_category(rest, vocab)?;
            (left, Some(c))
        }
        Task::Aste => match rest {
            [left @ .., "means", it] if *it == IMPLICIT_ASPECT => (left, None),
            _ => return Err(ParseErrorKind::MissingMeans),
        },
        _ => (rest, None),
    };

    let (aspect, opinion) = match task {
        Task::Aesc => (aspect_of(left)?, None),
        Task::Tasd => {
            let (at, left_sentiment) = strip_sentiment(left, lexicon)?;
            if left_sentiment != sentiment {
                return Err(ParseErrorKind::SentimentMismatch);
            }
            (aspect_of(at)?, None)
        }
        _ => {
            let (a, o) = split_aspect_opinion(left)?;
            (a, Some(o))
        }
    };
    debug_assert_eq!(category.is_some(), task.has(Element::AspectCategory));
    Ok(Tuple {
        aspect,
        category,
        opinion,
        sentiment: Some(sentiment),
    })
}

/// Splits, parses and deduplicates one generated sequence.
pub fn parse_prediction(
    generated: &str,
    task: Task,
    vocab: &CategoryVocab,
    lexicon: &SentimentLexicon,
) -> ParseOutcome {
    let mut outcome = ParseOutcome::empty(task);
    for segment in split_ssep(generated) {
        outcome.raw_segment_count += 1;
        match parse_segment(segment, task, vocab, lexicon) {
            Ok(tuple) => {
                if tuple.aspect.is_implicit() {
                    outcome.implicit_aspects += 1;
                }
                outcome.tuples.insert(tuple);
            }
            Err(reason) => outcome.malformed.push(Malformed {
                segment: segment.to_string(),
                reason,
            }),
        }
    }
    outcome
}
