//! Shared fixtures for the benchmarks.

use hyperdev_core::montecarlo::{Bitset, StreamFactory};
use hyperdev_core::Vertex;

/// `count` random subsets of `1..=n` of size `m`, reproducible from `seed`.
pub fn random_subsets(n: u32, m: usize, count: usize, seed: u64) -> Vec<Vec<Vertex>> {
    let streams = StreamFactory::new(seed);
    (0..count as u64)
        .map(|i| {
            rand::seq::index::sample(&mut streams.stream(i), n as usize, m)
                .into_iter()
                .map(|v| v as Vertex + 1)
                .collect()
        })
        .collect()
}

pub fn bitsets(n: u32, subsets: &[Vec<Vertex>]) -> Vec<Bitset> {
    subsets.iter().map(|s| Bitset::from_members(n, s)).collect()
}
