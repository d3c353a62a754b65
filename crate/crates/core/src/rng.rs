//! Seeded randomness with a pinned algorithm.
//!
//! Every random decision in the toolkit goes through this module so that a
//! seed reproduces the same output on any platform and any dependency
//! version: ChaCha8 keyed by `seed` (via `seed_from_u64`), one stream per
//! purpose, uniform integers by rejection sampling on `next_u64`, and a
//! descending Fisher–Yates shuffle.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent streams carved out of one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    FewShot = 0,
    Templates = 1,
    RecordOrder = 2,
}

/// A ChaCha8 generator for `seed`, `stream` and `epoch`.
pub fn seeded(seed: u64, stream: Stream, epoch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((epoch << 8) | stream as u64);
    rng
}

/// Uniform integer in `0..bound`. Panics when `bound == 0`.
pub fn uniform_below<R: RngCore + ?Sized>(rng: &mut R, bound: u64) -> u64 {
    assert!(bound > 0, "uniform_below needs a positive bound");
    // Largest multiple of `bound` representable; draws at or above it are rejected.
    let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
    loop {
        let x = rng.next_u64();
        if x <= zone {
            return x % bound;
        }
    }
}

/// In-place Fisher–Yates: for i = n-1 down to 1, swap i with uniform j in 0..=i.
pub fn shuffle<T, R: RngCore + ?Sized>(rng: &mut R, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = uniform_below(rng, i as u64 + 1) as usize;
        items.swap(i, j);
    }
}
