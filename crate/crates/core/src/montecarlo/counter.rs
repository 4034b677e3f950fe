//! Edge counting inside a sampled subset, with specialised paths for
//! progressions and additive quadruples.

use crate::error::{invalid, Result};
use crate::generators::Family;
use crate::hypergraph::{Vertex, WeightedHypergraph};

/// Membership bitmask over `1..=n`; vertex `v` is bit `v - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bitset {
    n: u32,
    words: Vec<u64>,
}

impl Bitset {
    pub fn new(n: u32) -> Self {
        Self {
            n,
            words: vec![0; (n as usize).div_ceil(64)],
        }
    }

    pub fn from_members(n: u32, members: &[Vertex]) -> Self {
        let mut b = Self::new(n);
        members.iter().for_each(|&v| b.insert(v));
        b
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn insert(&mut self, v: Vertex) {
        let i = (v - 1) as usize;
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn contains(&self, v: Vertex) -> bool {
        let i = (v - 1) as usize;
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn members(&self) -> Vec<Vertex> {
        let mut out = Vec::new();
        for (i, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push((i * 64) as Vertex + w.trailing_zeros() + 1);
                w &= w - 1;
            }
        }
        out
    }

    /// Word `i` of the set shifted down by `s` bits.
    #[inline]
    fn shifted_word(&self, i: usize, s: usize) -> u64 {
        let (q, r) = (s / 64, s % 64);
        let lo = self.words.get(i + q).copied().unwrap_or(0);
        if r == 0 {
            return lo;
        }
        let hi = self.words.get(i + q + 1).copied().unwrap_or(0);
        (lo >> r) | (hi << (64 - r))
    }
}

/// Counting strategy for one hypergraph.
#[derive(Clone, Debug)]
pub enum Counter {
    /// Word-parallel scan over common differences.
    Progression { k: usize },
    /// Pairs grouped by their sum.
    Sidon,
    /// Incidence lists; each edge is seen once through its smallest vertex.
    Generic,
}

impl Counter {
    pub fn for_hypergraph(h: &WeightedHypergraph) -> Self {
        match Family::detect(h) {
            Some(Family::Ap { k, .. }) => Counter::Progression { k },
            Some(Family::Sidon { .. }) => Counter::Sidon,
            None => Counter::Generic,
        }
    }

    /// Weighted edge count of `h` inside the subset given both as a list of
    /// members and as a bitmask. `scratch` is reused between calls.
    pub fn count(&self, h: &WeightedHypergraph, members: &[Vertex], bits: &Bitset, scratch: &mut Vec<u32>) -> f64 {
        match *self {
            Counter::Progression { k } => progression_count(bits, k) as f64,
            Counter::Sidon => sidon_count(h.n(), members, scratch) as f64,
            Counter::Generic => {
                let mut total = 0.0;
                for &b in members {
                    for &id in h.incident(b) {
                        let e = h.edge(id as usize);
                        if e[0] == b && e[1..].iter().all(|&v| bits.contains(v)) {
                            total += h.weight(id as usize);
                        }
                    }
                }
                total
            }
        }
    }
}

/// `Σ_d popcount(B ∧ (B >> d) ∧ ... ∧ (B >> (k-1)d))`.
fn progression_count(bits: &Bitset, k: usize) -> u64 {
    let n = bits.n() as usize;
    if n < k {
        return 0;
    }
    let mut total = 0u64;
    for d in 1..=(n - 1) / (k - 1) {
        // Starting points a satisfy a + (k-1)d <= n.
        let span = n - (k - 1) * d;
        let words = span.div_ceil(64);
        for i in 0..words {
            let mut acc = bits.words[i];
            let mut j = 1;
            while j < k && acc != 0 {
                acc &= bits.shifted_word(i, j * d);
                j += 1;
            }
            total += acc.count_ones() as u64;
        }
    }
    total
}

/// `Σ_T C(c_T, 2)` with `c_T` the number of member pairs summing to `T`.
fn sidon_count(n: u32, members: &[Vertex], by_sum: &mut Vec<u32>) -> u64 {
    by_sum.clear();
    by_sum.resize(2 * n as usize + 1, 0);
    let mut total = 0u64;
    for (i, &x) in members.iter().enumerate() {
        for &y in &members[i + 1..] {
            let slot = &mut by_sum[(x + y) as usize];
            total += *slot as u64;
            *slot += 1;
        }
    }
    total
}

/// Structure-aware edge count for hypergraphs produced by the progression
/// or additive-quadruple generators.
pub fn count_fast(h: &WeightedHypergraph, b: &Bitset) -> Result<f64> {
    if b.n() != h.n() {
        return invalid(format!("bitmask over {} vertices, hypergraph over {}", b.n(), h.n()));
    }
    let counter = Counter::for_hypergraph(h);
    if matches!(counter, Counter::Generic) {
        return invalid("count_fast needs a progression or additive-quadruple hypergraph");
    }
    let members = b.members();
    Ok(counter.count(h, &members, b, &mut Vec::new()))
}
