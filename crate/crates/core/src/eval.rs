//! Tuple-level micro precision, recall and F1.
//!
//! Per example, both the predicted and the gold side are sets: a tuple
//! generated twice is one prediction and can be one true positive at most.
//! Counts are summed over the corpus and the ratios are exact rationals.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::domain::{project, DomainError, Example, Task, Tuple};
use crate::parser::ParseOutcome;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("prediction for `{id}` was parsed as {found}, expected {expected}")]
    TaskMismatch { id: String, expected: Task, found: Task },
    #[error("gold example `{id}`: {source}")]
    Gold { id: String, source: DomainError },
}

/// An exact ratio in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fraction(pub Ratio<u64>);

impl Fraction {
    pub fn zero() -> Self {
        Fraction(Ratio::from_integer(0))
    }

    /// `num / den`, or zero when `den == 0`.
    pub fn of(num: u64, den: u64) -> Self {
        if den == 0 {
            Self::zero()
        } else {
            Fraction(Ratio::new(num, den))
        }
    }

    pub fn value(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4}", self.value())
    }
}

#[derive(Serialize, Deserialize)]
struct FractionRepr {
    ratio: String,
    value: String,
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FractionRepr {
            ratio: format!("{}/{}", self.0.numer(), self.0.denom()),
            value: self.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = FractionRepr::deserialize(d)?;
        let (n, m) = repr
            .ratio
            .split_once('/')
            .ok_or_else(|| serde::de::Error::custom("ratio must be `num/den`"))?;
        let n: u64 = n.parse().map_err(serde::de::Error::custom)?;
        let m: u64 = m.parse().map_err(serde::de::Error::custom)?;
        if m == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Fraction(Ratio::new(n, m)))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreOptions {
    pub casefold: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleScore {
    pub id: String,
    pub tp: u64,
    pub pred: u64,
    pub gold: u64,
    pub malformed_segments: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub task: Task,
    pub tp: u64,
    pub pred_count: u64,
    pub gold_count: u64,
    pub precision: Fraction,
    pub recall: Fraction,
    pub f1: Fraction,
    /// Gold tuples dropped because the same example already had them.
    pub gold_duplicates_removed: u64,
    pub malformed_segments: u64,
    pub options: ScoreOptions,
    pub per_example: Vec<ExampleScore>,
}

/// Precision, recall and F1 from micro counts.
pub fn prf(tp: u64, pred: u64, gold: u64) -> (Fraction, Fraction, Fraction) {
    let p = Fraction::of(tp, pred);
    let r = Fraction::of(tp, gold);
    let sum = p.0 + r.0;
    let f1 = if sum == Ratio::from_integer(0) {
        Fraction::zero()
    } else {
        Fraction(Ratio::from_integer(2) * p.0 * r.0 / sum)
    };
    (p, r, f1)
}

fn fold(tuples: impl IntoIterator<Item = Tuple>, casefold: bool) -> BTreeSet<Tuple> {
    tuples
        .into_iter()
        .map(|t| if casefold { t.casefolded() } else { t })
        .collect()
}

/// Gold tuples of one example under `task`, deduplicated, plus the number of
/// duplicates removed.
pub fn gold_tuples(example: &Example, task: Task) -> Result<(BTreeSet<Tuple>, u64), DomainError> {
    let all = example
        .quads
        .iter()
        .map(|q| project(q, task))
        .collect::<Result<Vec<_>, _>>()?;
    let n = all.len() as u64;
    let set: BTreeSet<Tuple> = all.into_iter().collect();
    let dups = n - set.len() as u64;
    Ok((set, dups))
}

/// Scores `(gold, predicted)` pairs for `task`.
pub fn score<'a, I>(pairs: I, task: Task, options: ScoreOptions) -> Result<ScoreReport, EvalError>
where
    I: IntoIterator<Item = (&'a Example, &'a ParseOutcome)>,
{
    let mut report = ScoreReport {
        task,
        tp: 0,
        pred_count: 0,
        gold_count: 0,
        precision: Fraction::zero(),
        recall: Fraction::zero(),
        f1: Fraction::zero(),
        gold_duplicates_removed: 0,
        malformed_segments: 0,
        options,
        per_example: Vec::new(),
    };
    for (gold, predicted) in pairs {
        if predicted.task != task {
            return Err(EvalError::TaskMismatch {
                id: gold.id.clone(),
                expected: task,
                found: predicted.task,
            });
        }
        let (gold_set, dups) = gold_tuples(gold, task).map_err(|source| EvalError::Gold {
            id: gold.id.clone(),
            source,
        })?;
        let gold_set = fold(gold_set, options.casefold);
        let pred_set = fold(predicted.tuples.iter().cloned(), options.casefold);
        let tp = pred_set.intersection(&gold_set).count() as u64;
        let malformed = predicted.malformed.len() as u64;
        if dups > 0 {
            log::info!("{}: removed {dups} duplicate gold tuple(s) for {task}", gold.id);
        }
        report.tp += tp;
        report.pred_count += pred_set.len() as u64;
        report.gold_count += gold_set.len() as u64;
        report.gold_duplicates_removed += dups;
        report.malformed_segments += malformed;
        report.per_example.push(ExampleScore {
            id: gold.id.clone(),
            tp,
            pred: pred_set.len() as u64,
            gold: gold_set.len() as u64,
            malformed_segments: malformed,
        });
    }
    let (p, r, f1) = prf(report.tp, report.pred_count, report.gold_count);
    report.precision = p;
    report.recall = r;
    report.f1 = f1;
    Ok(report)
}

/// A score report with the run and shot labels used for grouping.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledReport {
    pub run: String,
    /// Shot count such as `5`, or `full`.
    pub k: String,
    pub report: ScoreReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Json,
    Markdown,
}

impl std::str::FromStr for Layout {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_lowercase().as_str() {
            "json" => Ok(Layout::Json),
            "markdown" | "md" => Ok(Layout::Markdown),
            other => Err(format!("unknown layout `{other}` (json, markdown)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub task: Task,
    pub run: String,
    pub k: String,
    pub runs: usize,
    pub f1_mean: f64,
    /// Sample standard deviation across runs; zero for a single run.
    pub f1_std: f64,
    pub f1_values: Vec<String>,
}

fn k_order(a: &str, b: &str) -> Ordering {
    let key = |k: &str| k.parse::<u64>().unwrap_or(u64::MAX);
    key(a).cmp(&key(b)).then_with(|| a.cmp(b))
}

/// Groups reports by (task, run, k) and aggregates F1 across seeds.
pub fn summarize(reports: &[LabeledReport]) -> Vec<ReportRow> {
    let mut groups: BTreeMap<(Task, String, String), Vec<Fraction>> = BTreeMap::new();
    for r in reports {
        groups
            .entry((r.report.task, r.run.clone(), r.k.clone()))
            .or_default()
            .push(r.report.f1);
    }
    let mut rows: Vec<ReportRow> = groups
        .into_iter()
        .map(|((task, run, k), f1s)| {
            let n = f1s.len();
            let values: Vec<f64> = f1s.iter().map(|f| f.value()).collect();
            let mean = values.iter().sum::<f64>() / n as f64;
            let std = if n > 1 {
                (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            } else {
                0.0
            };
            ReportRow {
                task,
                run,
                k,
                runs: n,
                f1_mean: mean,
                f1_std: std,
                f1_values: f1s.iter().map(|f| f.to_string()).collect(),
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        a.task
            .cmp(&b.task)
            .then_with(|| a.run.cmp(&b.run))
            .then_with(|| k_order(&a.k, &b.k))
    });
    rows
}

/// Renders a table with columns Task, Model/Run, K, F1.
pub fn report(reports: &[LabeledReport], layout: Layout) -> String {
    let rows = summarize(reports);
    match layout {
        Layout::Json => serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n",
        Layout::Markdown => {
            let mut out = String::from("| Task | Model/Run | K | F1 |\n|---|---|---|---|\n");
            for r in rows {
                let f1 = if r.runs > 1 {
                    format!("{:.4} ± {:.4} (n={})", r.f1_mean, r.f1_std, r.runs)
                } else {
                    format!("{:.4}", r.f1_mean)
                };
                out.push_str(&format!("| {} | {} | {} | {} |\n", r.task, r.run, r.k, f1));
            }
            out
        }
    }
}
