//! Arithmetic hypergraphs (k-term progressions, additive quadruples) and
//! random uniform hypergraphs.

use std::collections::HashSet;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hypergraph::{DegreeStats, HypergraphBuilder, Vertex, WeightedHypergraph};
use crate::scalar::binomial_u128;

/// Generators refuse to materialise more edges than this.
pub const MAX_MATERIALIZED_EDGES: u128 = 50_000_000;

/// Structured hypergraph families with specialised counting and statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// Increasing k-term arithmetic progressions in `1..=n`.
    Ap { n: u32, k: usize },
    /// 4-sets `{x, y, z, w}` of distinct values with `x + y = z + w`.
    Sidon { n: u32 },
}

impl Family {
    pub fn n(&self) -> u32 {
        match *self {
            Family::Ap { n, .. } | Family::Sidon { n } => n,
        }
    }

    pub fn k(&self) -> usize {
        match *self {
            Family::Ap { k, .. } => k,
            Family::Sidon { .. } => 4,
        }
    }

    /// Exact number of edges, without materialising them.
    pub fn edge_count(&self) -> u128 {
        match *self {
            Family::Ap { n, k } => ap_count(n, k),
            Family::Sidon { n } => (2..=2 * n as u64)
                .map(|t| {
                    let p = sum_pairs(n, t) as u128;
                    p * p.saturating_sub(1) / 2
                })
                .sum(),
        }
    }

    pub fn generate(&self) -> Result<WeightedHypergraph> {
        match *self {
            Family::Ap { n, k } => gen_ap(n, k),
            Family::Sidon { n } => gen_sidon(n),
        }
    }

    /// Exact vertex degrees computed by counting, in `O(N k)` for
    /// progressions and `O(N²)` for additive quadruples.
    pub fn degrees(&self) -> Vec<f64> {
        match *self {
            Family::Ap { n, k } => (1..=n).map(|x| ap_degree(n, k, x) as f64).collect(),
            Family::Sidon { n } => (1..=n).map(|a| sidon_degree(n, a) as f64).collect(),
        }
    }

    /// Degree statistics without building the edge list, so sizes far beyond
    /// [`MAX_MATERIALIZED_EDGES`] are reachable. Maximum set degrees above
    /// `r = 1` come from closed forms for the additive-quadruple family and
    /// from the generated hypergraph for progressions.
    pub fn degree_stats(&self) -> Result<DegreeStats> {
        let degrees = self.degrees();
        let total = self.edge_count() as f64;
        let delta1 = degrees.iter().copied().fold(0.0, f64::max);
        let max_r = match *self {
            Family::Ap { .. } => {
                let h = self.generate()?;
                let mut v = vec![delta1];
                for r in 2..=self.k() {
                    v.push(h.max_r_degree(r)?);
                }
                v
            }
            Family::Sidon { n } => vec![
                delta1,
                sidon_max_pair_degree(n) as f64,
                sidon_max_triple_degree(n) as f64,
                if n >= 4 { 1.0 } else { 0.0 },
            ],
        };
        Ok(DegreeStats::from_degrees(&degrees, self.k(), total, max_r))
    }

    /// Recognises a hypergraph that coincides with one of the families:
    /// unit weights, every edge of the right shape, and the full edge count.
    pub fn detect(h: &WeightedHypergraph) -> Option<Family> {
        if let Some(f) = h.family() {
            return Some(f);
        }
        let unit = (0..h.edge_count()).all(|id| h.weight(id) == 1.0);
        if !unit {
            return None;
        }
        let n = h.n();
        let k = h.k();
        if k >= 3 && h.edges().all(|(e, _)| is_progression(e)) {
            let fam = Family::Ap { n, k };
            if fam.edge_count() == h.edge_count() as u128 {
                return Some(fam);
            }
        }
        if k == 4 && h.edges().all(|(e, _)| e[0] + e[3] == e[1] + e[2]) {
            let fam = Family::Sidon { n };
            if fam.edge_count() == h.edge_count() as u128 {
                return Some(fam);
            }
        }
        None
    }
}

fn is_progression(sorted: &[Vertex]) -> bool {
    let d = sorted[1] - sorted[0];
    sorted.windows(2).all(|w| w[1] - w[0] == d)
}

/// Number of increasing k-APs in `1..=n`.
pub fn ap_count(n: u32, k: usize) -> u128 {
    if k < 2 || (n as usize) < k {
        return 0;
    }
    let span = (k - 1) as u64;
    (1..=(n as u64 - 1) / span)
        .map(|d| (n as u64 - span * d) as u128)
        .sum()
}

/// Number of k-APs in `1..=n` through `x`.
fn ap_degree(n: u32, k: usize, x: u32) -> u64 {
    let (n, x) = (n as u64, x as u64);
    (0..k as u64)
        .map(|j| {
            let before = if j == 0 { u64::MAX } else { (x - 1) / j };
            let after_terms = k as u64 - 1 - j;
            let after = if after_terms == 0 {
                u64::MAX
            } else {
                (n - x) / after_terms
            };
            before.min(after)
        })
        .sum()
}

/// Unordered pairs `{c, d}`, `c < d`, in `1..=n` with `c + d = t`.
fn sum_pairs(n: u32, t: u64) -> u64 {
    let n = n as u64;
    let lo = 1.max(t.saturating_sub(n));
    let hi = (t - 1) / 2;
    if hi >= lo {
        hi - lo + 1
    } else {
        0
    }
}

fn sidon_degree(n: u32, a: u32) -> u64 {
    (1..=n)
        .filter(|&b| b != a)
        .map(|b| sum_pairs(n, (a + b) as u64) - 1)
        .sum()
}

/// Edges of the additive-quadruple hypergraph through both `a < b`.
fn sidon_pair_degree(n: u32, a: u32, b: u32) -> u64 {
    let same_side = sum_pairs(n, (a + b) as u64) - 1;
    // Opposite sides: a + x = b + y, so y = x - (b - a).
    let gap = b - a;
    let lo = gap + 1;
    if lo > n {
        return same_side;
    }
    let mut cross = (n - gap) as u64;
    for bad in [a, b, 2 * b - a] {
        if (lo..=n).contains(&bad) {
            cross -= 1;
        }
    }
    same_side + cross
}

fn sidon_max_pair_degree(n: u32) -> u64 {
    let mut best = 0;
    for a in 1..=n {
        for b in a + 1..=n {
            best = best.max(sidon_pair_degree(n, a, b));
        }
    }
    best
}

/// A triple `{a, b, c}` extends to at most three quadruples, one per choice
/// of the fourth value among `a + b - c`, `a + c - b`, `b + c - a`. The
/// triple `{2, 4, 5}` attains three once `n >= 7`.
fn sidon_max_triple_degree(n: u32) -> u64 {
    if n >= 7 {
        return 3;
    }
    let mut best = 0;
    for a in 1..=n as i64 {
        for b in a + 1..=n as i64 {
            for c in b + 1..=n as i64 {
                let mut fourth = [a + b - c, a + c - b, b + c - a];
                fourth.sort_unstable();
                let mut count = 0;
                let mut prev = 0;
                for w in fourth {
                    if w >= 1 && w <= n as i64 && w != a && w != b && w != c && w != prev {
                        count += 1;
                    }
                    prev = w;
                }
                best = best.max(count);
            }
        }
    }
    best
}

/// Hypergraph of increasing k-APs `{a, a+d, ..., a+(k-1)d}` in `1..=n`,
/// enumerated directly over `(a, d)`.
pub fn gen_ap(n: u32, k: usize) -> Result<WeightedHypergraph> {
    if k < 3 {
        return invalid(format!("progression length k = {k} must be at least 3"));
    }
    if (n as usize) < k {
        return invalid(format!("N = {n} is smaller than k = {k}"));
    }
    let edges = ap_count(n, k);
    if edges > MAX_MATERIALIZED_EDGES {
        return Err(Error::ResourceLimit {
            required: edges,
            limit: MAX_MATERIALIZED_EDGES,
        });
    }
    let mut builder = HypergraphBuilder::new(n, k)?.with_family(Family::Ap { n, k });
    builder.reserve(edges as usize);
    let span = (k - 1) as u32;
    let mut edge = vec![0; k];
    for d in 1..=(n - 1) / span {
        for a in 1..=n - span * d {
            for (j, slot) in edge.iter_mut().enumerate() {
                *slot = a + j as u32 * d;
            }
            builder.add_edge(&edge, 1.0)?;
        }
    }
    Ok(builder.build())
}

/// Hypergraph of additive quadruples: one unit edge per 4-set of distinct
/// values in `1..=n` admitting a pairing `x + y = z + w`.
///
/// Pairs are grouped by their sum and combined within each group. A 4-set
/// of distinct values has at most one such pairing, so no weight exceeds 1.
pub fn gen_sidon(n: u32) -> Result<WeightedHypergraph> {
    if n < 4 {
        return invalid(format!("N = {n} must be at least 4"));
    }
    let fam = Family::Sidon { n };
    let edges = fam.edge_count();
    if edges > MAX_MATERIALIZED_EDGES {
        return Err(Error::ResourceLimit {
            required: edges,
            limit: MAX_MATERIALIZED_EDGES,
        });
    }
    let mut builder = HypergraphBuilder::new(n, 4)?.with_family(fam);
    builder.reserve(edges as usize);
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for t in 3..2 * n {
        pairs.clear();
        let lo = 1.max(t.saturating_sub(n));
        pairs.extend((lo..=(t - 1) / 2).map(|c| (c, t - c)));
        for (i, &(x, y)) in pairs.iter().enumerate() {
            for &(z, w) in &pairs[i + 1..] {
                builder.add_edge(&[x, y, z, w], 1.0)?;
            }
        }
    }
    debug_assert_eq!(builder.duplicates_merged(), 0);
    Ok(builder.build())
}

/// `edge_count` distinct k-sets chosen uniformly at random, unit weights,
/// reproducible from `seed`.
pub fn gen_random(n: u32, k: usize, edge_count: usize, seed: u64) -> Result<WeightedHypergraph> {
    let mut builder = HypergraphBuilder::new(n, k)?;
    let possible = binomial_u128(n as u64, k as u64);
    if possible.is_some_and(|c| (edge_count as u128) > c) {
        return invalid(format!(
            "cannot choose {edge_count} distinct {k}-sets from {n} vertices"
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    builder.reserve(edge_count);
    match possible {
        // Dense requests: shuffle the full list of k-sets.
        Some(c) if c <= 1 << 22 && (edge_count as u128) * 4 > c => {
            let mut all: Vec<Vec<Vertex>> = Vec::with_capacity(c as usize);
            let universe: Vec<Vertex> = (1..=n).collect();
            crate::hypergraph::for_each_subset(&universe, k, |s| all.push(s.to_vec()));
            for pos in index::sample(&mut rng, all.len(), edge_count) {
                builder.add_edge(&all[pos], 1.0)?;
            }
        }
        _ => {
            let mut seen: HashSet<Vec<Vertex>> = HashSet::with_capacity(edge_count);
            while seen.len() < edge_count {
                let mut e: Vec<Vertex> = index::sample(&mut rng, n as usize, k)
                    .into_iter()
                    .map(|i| i as Vertex + 1)
                    .collect();
                e.sort_unstable();
                if seen.insert(e.clone()) {
                    builder.add_edge(&e, 1.0)?;
                }
            }
        }
    }
    Ok(builder.build())
}
