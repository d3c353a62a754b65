//! Generators shared by the integration suites. They use their own
//! SplitMix64 so test data does not depend on the crate's rng module.

#![allow(dead_code)]

use std::path::PathBuf;

use absa_forge::{AspectTerm, Capabilities, Category, Dataset, Example, Quad, Sentiment, Split};

pub struct Gen(u64);

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen(seed)
    }

    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `0..n` (slight modulo bias is irrelevant here).
    pub fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }

    pub fn range(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        lo + self.below(hi_inclusive - lo + 1)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        ((self.next() >> 11) as f64 / (1u64 << 53) as f64) < p
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len())]
    }
}

/// Free-text vocabulary. Contains the sentiment words and category-like words
/// but none of `is`, `it`, `means`.
pub const WORDS: &[&str] = &[
    "burger", "fries", "food", "service", "quality", "general", "great", "bad", "ok", "the",
    "a", "very", "not", "so", "staff", "wine", "view", "cheap", "loved", "hated", "soggy", "crisp",
    "slow", "fast", "friendly", "rude", "prices", "menu", "décor", "café", "was", "are", "and",
    "of", "with", "too", "really", "pasta", "sushi", "fresh", "stale", "drinks", "style_options",
    "ambience", "restaurant", "location", "miscellaneous", "battery", "screen", "keyboard", "!",
    "'s", "n't", "-", "$", "10", "it's", "isn't", "meaning", "island",
];

pub fn phrase(g: &mut Gen, max_words: usize) -> String {
    let n = g.range(1, max_words);
    (0..n).map(|_| *g.pick(WORDS)).collect::<Vec<_>>().join(" ")
}

pub fn category_pool(g: &mut Gen, n: usize) -> Vec<String> {
    let mut pool: Vec<String> = Vec::new();
    while pool.len() < n {
        let c = phrase(g, 3).to_lowercase();
        if !pool.contains(&c) {
            pool.push(c);
        }
    }
    pool
}

pub fn sentiment(g: &mut Gen) -> Sentiment {
    *g.pick(&Sentiment::ALL)
}

pub fn quad(g: &mut Gen, categories: &[String]) -> Quad {
    let aspect = if g.chance(0.1) {
        AspectTerm::Implicit
    } else {
        AspectTerm::Explicit(phrase(g, 4))
    };
    Quad::new(
        aspect,
        Some(Category::from_surface(g.pick(categories)).unwrap()),
        Some(phrase(g, 5)),
        sentiment(g),
    )
}

pub fn example(g: &mut Gen, id: String, categories: &[String], max_quads: usize) -> Example {
    let n = g.range(1, max_quads);
    Example {
        id,
        text: phrase(g, 12),
        quads: (0..n).map(|_| quad(g, categories)).collect(),
    }
}

pub fn dataset(g: &mut Gen, n: usize, max_quads: usize) -> Dataset {
    let cats = category_pool(g, 6);
    let examples = (0..n)
        .map(|i| example(g, format!("train:{}", i + 1), &cats, max_quads))
        .collect();
    Dataset::new(
        "synthetic",
        Split::Train,
        examples,
        Capabilities {
            has_category: true,
            has_opinion: true,
        },
    )
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}
