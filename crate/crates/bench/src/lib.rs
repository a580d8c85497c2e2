//! Shared fixtures for the benchmarks.

use ong_core::rng::{labels, sample_points};
use ong_core::{PointSequence, RandomStream};

/// `n` uniform points in `(0,1)^d` from a fixed stream.
pub fn uniform_sequence(n: usize, d: usize, seed: u64) -> PointSequence {
    sample_points(n, d, &mut RandomStream::new(seed).child(labels::POINTS).rng()).expect("valid sizes")
}
