//! k-shot subset selection.
//!
//! The dataset is shuffled with the pinned Fisher–Yates of [`crate::rng`]
//! and the shortest prefix is kept such that every stratum value `v`
//! (a category surface or a sentiment) occurring `T_v` times in the full
//! dataset occurs at least `min(k, T_v)` times in the prefix. An example
//! counts once toward each distinct value among its quads.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::Example;
use crate::ingest::Dataset;
use crate::rng::{seeded, shuffle, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stratum {
    Category,
    Sentiment,
}

impl FromStr for Stratum {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_lowercase().as_str() {
            "category" => Ok(Stratum::Category),
            "sentiment" => Ok(Stratum::Sentiment),
            other => Err(format!("unknown stratum `{other}` (category, sentiment)")),
        }
    }
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stratum::Category => "category",
            Stratum::Sentiment => "sentiment",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FewShotSpec {
    pub k: usize,
    pub stratify_by: Stratum,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FewShotError {
    #[error("invalid few-shot spec: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StratumCount {
    /// Occurrences in the full dataset.
    pub total: usize,
    /// `min(k, total)`.
    pub required: usize,
    /// Occurrences in the selected prefix.
    pub selected: usize,
}

#[derive(Debug, Clone)]
pub struct FewShotSample {
    pub dataset: Dataset,
    pub prefix_len: usize,
    pub counts: BTreeMap<String, StratumCount>,
}

/// Distinct stratum values of one example.
pub fn stratum_values(example: &Example, by: Stratum) -> BTreeSet<String> {
    example
        .quads
        .iter()
        .filter_map(|q| match by {
            Stratum::Category => q.category.as_ref().map(|c| c.surface().to_string()),
            Stratum::Sentiment => Some(q.sentiment.to_string()),
        })
        .collect()
}

/// The seeded example order used by [`sample_fewshot`], as indices.
pub fn shuffled_order(len: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..len).collect();
    shuffle(&mut seeded(seed, Stream::FewShot, 0), &mut order);
    order
}

pub fn sample_fewshot(dataset: &Dataset, spec: &FewShotSpec) -> Result<FewShotSample, FewShotError> {
    if spec.k == 0 {
        return Err(FewShotError::InvalidSpec("k must be positive".into()));
    }
    if spec.stratify_by == Stratum::Category && !dataset.capabilities.has_category {
        return Err(FewShotError::InvalidSpec(format!(
            "dataset `{}` has no category annotations; stratify by sentiment",
            dataset.name
        )));
    }

    let values: Vec<BTreeSet<String>> = dataset
        .examples
        .iter()
        .map(|e| stratum_values(e, spec.stratify_by))
        .collect();
    let mut counts: BTreeMap<String, StratumCount> = BTreeMap::new();
    for v in values.iter().flatten() {
        counts
            .entry(v.clone())
            .or_insert(StratumCount {
                total: 0,
                required: 0,
                selected: 0,
            })
            .total += 1;
    }
    for c in counts.values_mut() {
        c.required = c.total.min(spec.k);
    }

    let order = shuffled_order(dataset.examples.len(), spec.seed);
    let mut unmet = counts.values().filter(|c| c.required > 0).count();
    let mut prefix_len = 0;
    for &idx in &order {
        if unmet == 0 {
            break;
        }
        prefix_len += 1;
        for v in &values[idx] {
            let c = counts.get_mut(v).expect("value counted");
            c.selected += 1;
            if c.selected == c.required {
                unmet -= 1;
            }
        }
    }

    let examples = order[..prefix_len]
        .iter()
        .map(|&i| dataset.examples[i].clone())
        .collect();
    Ok(FewShotSample {
        dataset: Dataset::new(
            dataset.name.clone(),
            dataset.split,
            examples,
            dataset.capabilities,
        ),
        prefix_len,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{AspectTerm, Capabilities, Category, Quad, Sentiment};
    use crate::ingest::Split;

    fn dataset(cats: &[&[&str]]) -> Dataset {
        let examples = cats
            .iter()
            .enumerate()
            .map(|(i, cs)| Example {
                id: format!("train:{i}"),
                text: format!("sentence {i}"),
                quads: cs
                    .iter()
                    .map(|c| {
                        Quad::new(
                            AspectTerm::Explicit("x".into()),
                            Some(Category::from_surface(c).unwrap()),
                            Some("y".into()),
                            Sentiment::Positive,
                        )
                    })
                    .collect(),
            })
            .collect();
        Dataset::new(
            "toy",
            Split::Train,
            examples,
            Capabilities {
                has_category: true,
                has_opinion: true,
            },
        )
    }

    fn spec(k: usize, seed: u64) -> FewShotSpec {
        FewShotSpec {
            k,
            stratify_by: Stratum::Category,
            seed,
        }
    }

    #[test]
    fn prefix_ends_at_second_b() {
        let ds = dataset(&[&["a"], &["a"], &["b"], &["a"], &["b"], &["a"]]);
        for seed in 0..20 {
            let out = sample_fewshot(&ds, &spec(2, seed)).unwrap();
            // Replay the shuffle independently and find where both needs are met.
            let order = shuffled_order(6, seed);
            let (mut a, mut b) = (0, 0);
            let mut end = 0;
            for (pos, &i) in order.iter().enumerate() {
                if ds.examples[i].quads[0].category.as_ref().unwrap().surface() == "a" {
                    a += 1
                } else {
                    b += 1
                }
                if a >= 2 && b >= 2 {
                    end = pos + 1;
                    break;
                }
            }
            assert_eq!(out.prefix_len, end, "seed {seed}");
            let last = &out.dataset.examples[end - 1];
            let last_cat = last.quads[0].category.as_ref().unwrap().surface();
            // The last example completes whichever stratum finished last.
            let before: usize = out.dataset.examples[..end - 1]
                .iter()
                .filter(|e| e.quads[0].category.as_ref().unwrap().surface() == last_cat)
                .count();
            assert_eq!(before, 1);
        }
    }

    #[test]
    fn large_k_returns_everything() {
        let ds = dataset(&[&["a"], &["b", "a"], &["c"], &["a"]]);
        let out = sample_fewshot(&ds, &spec(100, 5)).unwrap();
        assert_eq!(out.prefix_len, 4);
        assert_eq!(out.counts["a"].selected, 3);
    }

    #[test]
    fn rejects_bad_specs() {
        let ds = dataset(&[&["a"]]);
        assert!(sample_fewshot(&ds, &spec(0, 1)).is_err());
        let mut no_cat = ds.clone();
        no_cat.capabilities.has_category = false;
        assert!(sample_fewshot(&no_cat, &spec(1, 1)).is_err());
        let by_sentiment = FewShotSpec {
            stratify_by: Stratum::Sentiment,
            ..spec(1, 1)
        };
        assert_eq!(sample_fewshot(&no_cat, &by_sentiment).unwrap().prefix_len, 1);
    }

    #[test]
    fn empty_dataset() {
        let ds = dataset(&[]);
        assert_eq!(sample_fewshot(&ds, &spec(5, 0)).unwrap().prefix_len, 0);
    }

    #[test]
    fn vocab_recomputed_on_subset() {
        let ds = dataset(&[&["a"], &["a"], &["a"], &["b"]]);
        let out = sample_fewshot(&ds, &spec(1, 3)).unwrap();
        assert_eq!(out.dataset.category_vocab.len(), 2);
    }
}
