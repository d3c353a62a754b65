//! Proptest strategies over the domain types.

#![allow(dead_code)]

use absa_forge::{AspectTerm, Capabilities, Category, Dataset, Example, Quad, Sentiment, Split};
use proptest::prelude::*;

const WORDS: &[&str] = &[
    "burger", "fries", "food", "service", "great", "bad", "ok", "the", "very", "not", "staff",
    "wine", "loved", "soggy", "slow", "prices", "café", "was", "and", "of", "general", "quality",
    "it's", "isn't", "island", "meaning", "!",
];

pub fn phrase(max_words: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(WORDS), 1..=max_words).prop_map(|w| w.join(" "))
}

pub fn sentiment() -> impl Strategy<Value = Sentiment> {
    prop::sample::select(Sentiment::ALL.to_vec())
}

pub fn aspect() -> impl Strategy<Value = AspectTerm> {
    prop_oneof![
        1 => Just(AspectTerm::Implicit),
        8 => phrase(4).prop_map(AspectTerm::Explicit),
    ]
}

pub fn categories() -> impl Strategy<Value = Vec<String>> {
    prop::collection::btree_set(phrase(3), 1..6).prop_map(|s| s.into_iter().collect())
}

pub fn quad(cats: Vec<String>) -> impl Strategy<Value = Quad> {
    (aspect(), prop::sample::select(cats), phrase(5), sentiment()).prop_map(|(a, c, o, s)| {
        Quad::new(a, Some(Category::from_surface(&c).unwrap()), Some(o), s)
    })
}

pub fn example_with(cats: Vec<String>, max_quads: usize) -> impl Strategy<Value = Example> {
    (phrase(12), prop::collection::vec(quad(cats), 1..=max_quads)).prop_map(|(text, quads)| Example {
        id: "train:1".into(),
        text,
        quads,
    })
}

pub fn example(max_quads: usize) -> impl Strategy<Value = Example> {
    categories().prop_flat_map(move |c| example_with(c, max_quads))
}

pub fn dataset(max_examples: usize) -> impl Strategy<Value = Dataset> {
    categories()
        .prop_flat_map(move |c| prop::collection::vec(example_with(c, 4), 1..=max_examples))
        .prop_map(|mut examples| {
            for (i, e) in examples.iter_mut().enumerate() {
                e.id = format!("train:{}", i + 1);
            }
            Dataset::new(
                "synthetic",
                Split::Train,
                examples,
                Capabilities {
                    has_category: true,
                    has_opinion: true,
                },
            )
        })
}
