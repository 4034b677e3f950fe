//! Weighted k-uniform hypergraphs on the vertex set `1..=n` and the degree
//! statistics every deviation estimate is built from.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::generators::Family;
use crate::scalar::{falling_ratio, Scalar};

/// Vertex id, 1-based.
pub type Vertex = u32;

/// Subsets of universes up to this size are tested through a bitmask.
pub const DEFAULT_MASK_THRESHOLD: u32 = 1 << 16;

/// An immutable weighted k-uniform hypergraph.
///
/// Edges are stored as sorted vertex tuples in one flat buffer, indexed by a
/// hash map keyed on the tuple and by per-vertex incidence lists.
#[derive(Clone, Debug)]
pub struct WeightedHypergraph {
    n: u32,
    k: usize,
    vertices: Vec<Vertex>,
    weights: Vec<f64>,
    index: HashMap<Box<[Vertex]>, u32>,
    incidence: Vec<Vec<u32>>,
    integral: bool,
    family: Option<Family>,
}

/// Incrementally collects edges, merging repeated vertex sets by summing
/// their weights.
#[derive(Debug)]
pub struct HypergraphBuilder {
    n: u32,
    k: usize,
    vertices: Vec<Vertex>,
    weights: Vec<f64>,
    index: HashMap<Box<[Vertex]>, u32>,
    merged: usize,
    family: Option<Family>,
}

impl HypergraphBuilder {
    pub fn new(n: u32, k: usize) -> Result<Self> {
        if n == 0 {
            return invalid("vertex count must be positive");
        }
        if k == 0 {
            return invalid("uniformity must be at least 1");
        }
        if k > n as usize {
            return invalid(format!("uniformity {k} exceeds vertex count {n}"));
        }
        Ok(Self {
            n,
            k,
            vertices: Vec::new(),
            weights: Vec::new(),
            index: HashMap::new(),
            merged: 0,
            family: None,
        })
    }

    pub(crate) fn with_family(mut self, family: Family) -> Self {
        self.family = Some(family);
        self
    }

    pub fn reserve(&mut self, edges: usize) {
        self.vertices.reserve(edges * self.k);
        self.weights.reserve(edges);
        self.index.reserve(edges);
    }

    /// Checks an edge against the hypergraph invariants and returns it sorted.
    pub fn validate_edge(&self, vertices: &[Vertex], weight: f64) -> Result<Vec<Vertex>> {
        if vertices.len() != self.k {
            return invalid(format!(
                "edge has {} vertices, expected {}",
                vertices.len(),
                self.k
            ));
        }
        if !(weight.is_finite() && weight > 0.0) {
            return invalid(format!("edge weight {weight} is not a positive finite number"));
        }
        let mut sorted = vertices.to_vec();
        sorted.sort_unstable();
        if let Some(&v) = sorted.iter().find(|&&v| v == 0 || v > self.n) {
            return invalid(format!("vertex {v} outside 1..={}", self.n));
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return invalid(format!("edge {vertices:?} repeats a vertex"));
        }
        Ok(sorted)
    }

    pub fn add_edge(&mut self, vertices: &[Vertex], weight: f64) -> Result<()> {
        let sorted = self.validate_edge(vertices, weight)?;
        self.insert_sorted(sorted, weight);
        Ok(())
    }

    fn insert_sorted(&mut self, sorted: Vec<Vertex>, weight: f64) {
        let key = sorted.into_boxed_slice();
        if let Some(&id) = self.index.get(&key) {
            self.weights[id as usize] += weight;
            self.merged += 1;
            return;
        }
        let id = self.weights.len() as u32;
        self.vertices.extend_from_slice(&key);
        self.weights.push(weight);
        self.index.insert(key, id);
    }

    /// Number of `add_edge` calls that landed on an existing vertex set.
    pub fn duplicates_merged(&self) -> usize {
        self.merged
    }

    pub fn build(self) -> WeightedHypergraph {
        let mut incidence = vec![Vec::new(); self.n as usize];
        for (id, edge) in self.vertices.chunks_exact(self.k).enumerate() {
            for &v in edge {
                incidence[(v - 1) as usize].push(id as u32);
            }
        }
        let integral = self
            .weights
            .iter()
            .all(|w| w.fract() == 0.0 && *w <= (1u64 << 53) as f64);
        WeightedHypergraph {
            n: self.n,
            k: self.k,
            vertices: self.vertices,
            weights: self.weights,
            index: self.index,
            incidence,
            integral,
            family: self.family,
        }
    }
}

impl WeightedHypergraph {
    /// Builds a hypergraph from `(vertices, weight)` pairs; duplicate vertex
    /// sets are merged by summing weights.
    pub fn from_edges<I, V>(n: u32, k: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (V, f64)>,
        V: AsRef<[Vertex]>,
    {
        let mut builder = HypergraphBuilder::new(n, k)?;
        for (v, w) in edges {
            builder.add_edge(v.as_ref(), w)?;
        }
        Ok(builder.build())
    }

    /// Unit-weight convenience constructor.
    pub fn from_unit_edges<I, V>(n: u32, k: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = V>,
        V: AsRef<[Vertex]>,
    {
        Self::from_edges(n, k, edges.into_iter().map(|v| (v, 1.0)))
    }

    pub fn empty(n: u32, k: usize) -> Result<Self> {
        Ok(HypergraphBuilder::new(n, k)?.build())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edge_count(&self) -> usize {
        self.weights.len()
    }

    /// True when every weight is an integer, so float sums are exact.
    pub fn is_integral(&self) -> bool {
        self.integral
    }

    /// The structured family this hypergraph was generated from, if known.
    pub fn family(&self) -> Option<Family> {
        self.family
    }

    #[cfg(test)]
    pub(crate) fn set_family(&mut self, family: Option<Family>) {
        self.family = family;
    }

    /// Sorted vertices of edge `id`.
    #[inline]
    pub fn edge(&self, id: usize) -> &[Vertex] {
        &self.vertices[id * self.k..(id + 1) * self.k]
    }

    #[inline]
    pub fn weight(&self, id: usize) -> f64 {
        self.weights[id]
    }

    pub fn edges(&self) -> impl Iterator<Item = (&[Vertex], f64)> + '_ {
        self.vertices
            .chunks_exact(self.k)
            .zip(self.weights.iter().copied())
    }

    /// Ids of the edges containing `x`.
    #[inline]
    pub fn incident(&self, x: Vertex) -> &[u32] {
        &self.incidence[(x - 1) as usize]
    }

    /// Weight of the edge with exactly these vertices, if present.
    pub fn edge_weight(&self, vertices: &[Vertex]) -> Option<f64> {
        let mut key = vertices.to_vec();
        key.sort_unstable();
        self.index
            .get(key.as_slice())
            .map(|&id| self.weights[id as usize])
    }

    /// `e(H)`: the sum of all edge weights.
    pub fn total_weight(&self) -> f64 {
        if self.integral {
            self.weights.iter().map(|&w| w as i128).sum::<i128>() as f64
        } else {
            self.weights.iter().sum()
        }
    }

    pub fn total_weight_exact<T: Scalar>(&self) -> T {
        self.weights
            .iter()
            .fold(T::zero(), |acc, &w| acc + T::from_weight(w))
    }

    fn check_vertex(&self, x: Vertex) -> Result<()> {
        if x == 0 || x > self.n {
            return invalid(format!("vertex {x} outside 1..={}", self.n));
        }
        Ok(())
    }

    /// Builds a membership view of `members` after checking the range.
    pub fn subset(&self, members: &[Vertex]) -> Result<VertexSet> {
        VertexSet::new(self.n, members)
    }

    /// `N^H(B)`: total weight of edges contained in `B`.
    pub fn edge_count_in_subset(&self, members: &[Vertex]) -> Result<f64> {
        Ok(self.count_in(&self.subset(members)?))
    }

    /// Weighted edge count inside a prepared subset. Integer-weighted
    /// hypergraphs are accumulated exactly.
    pub fn count_in(&self, set: &VertexSet) -> f64 {
        if self.integral {
            let mut acc: i128 = 0;
            self.for_each_edge_in(set, |id| acc += self.weights[id] as i128);
            acc as f64
        } else {
            let mut acc = 0.0;
            self.for_each_edge_in(set, |id| acc += self.weights[id]);
            acc
        }
    }

    pub fn count_in_exact<T: Scalar>(&self, set: &VertexSet) -> T {
        let mut acc = T::zero();
        self.for_each_edge_in(set, |id| acc = acc.clone() + T::from_weight(self.weights[id]));
        acc
    }

    /// Visits every edge inside `set` once, through its smallest vertex.
    fn for_each_edge_in(&self, set: &VertexSet, mut visit: impl FnMut(usize)) {
        for &v in set.members() {
            for &id in self.incident(v) {
                let edge = self.edge(id as usize);
                if edge[0] == v && edge[1..].iter().all(|&u| set.contains(u)) {
                    visit(id as usize);
                }
            }
        }
    }

    /// `d(x)`: total weight of edges containing `x`.
    pub fn degree(&self, x: Vertex) -> Result<f64> {
        self.check_vertex(x)?;
        Ok(self.degree_unchecked(x))
    }

    #[inline]
    pub(crate) fn degree_unchecked(&self, x: Vertex) -> f64 {
        self.incident(x)
            .iter()
            .map(|&id| self.weights[id as usize])
            .sum()
    }

    /// All vertex degrees, indexed by `x - 1`.
    pub fn degrees(&self) -> Vec<f64> {
        let mut deg = vec![0.0; self.n as usize];
        for (edge, w) in self.edges() {
            for &v in edge {
                deg[(v - 1) as usize] += w;
            }
        }
        deg
    }

    /// `d(R)`: total weight of edges containing every vertex of `R`.
    pub fn set_degree(&self, r: &[Vertex]) -> Result<f64> {
        if r.len() > self.k {
            return invalid(format!(
                "set of size {} exceeds uniformity {}",
                r.len(),
                self.k
            ));
        }
        for &x in r {
            self.check_vertex(x)?;
        }
        let Some(&pivot) = r.iter().min_by_key(|&&x| self.incident(x).len()) else {
            return Ok(self.total_weight());
        };
        Ok(self
            .incident(pivot)
            .iter()
            .filter(|&&id| {
                let edge = self.edge(id as usize);
                r.iter().all(|v| edge.binary_search(v).is_ok())
            })
            .map(|&id| self.weights[id as usize])
            .sum())
    }

    /// `Δ_r`: the largest set degree over r-sets, found by walking the
    /// r-subsets of each edge.
    pub fn max_r_degree(&self, r: usize) -> Result<f64> {
        if r == 0 || r > self.k {
            return invalid(format!("r = {r} outside 1..={}", self.k));
        }
        if r == self.k {
            return Ok(self.weights.iter().copied().fold(0.0, f64::max));
        }
        if r == 1 {
            return Ok(self.degrees().into_iter().fold(0.0, f64::max));
        }
        let mut best = 0.0f64;
        if r <= 4 {
            let mut tally: HashMap<u128, f64> = HashMap::new();
            for (edge, w) in self.edges() {
                for_each_subset(edge, r, |s| {
                    let key = s.iter().fold(0u128, |acc, &v| (acc << 32) | v as u128);
                    *tally.entry(key).or_default() += w;
                });
            }
            best = tally.values().copied().fold(best, f64::max);
        } else {
            let mut tally: HashMap<Vec<Vertex>, f64> = HashMap::new();
            for (edge, w) in self.edges() {
                for_each_subset(edge, r, |s| *tally.entry(s.to_vec()).or_default() += w);
            }
            best = tally.values().copied().fold(best, f64::max);
        }
        Ok(best)
    }

    /// Degree statistics in one pass over edges and one over vertices.
    pub fn degree_stats(&self) -> DegreeStats {
        let max_r = (1..=self.k)
            .map(|r| self.max_r_degree(r).expect("r in range"))
            .collect();
        DegreeStats::from_degrees(&self.degrees(), self.k, self.total_weight(), max_r)
    }

    /// Link hypergraph `H(x)`: for each edge through `x`, the edge minus `x`
    /// with the same weight. Lives on the same vertex universe.
    pub fn link(&self, x: Vertex) -> Result<WeightedHypergraph> {
        self.check_vertex(x)?;
        if self.k == 1 {
            return invalid("link of a 1-uniform hypergraph is 0-uniform");
        }
        let mut builder = HypergraphBuilder::new(self.n, self.k - 1)?;
        for &id in self.incident(x) {
            let rest: Vec<Vertex> = self
                .edge(id as usize)
                .iter()
                .copied()
                .filter(|&v| v != x)
                .collect();
            builder.insert_sorted(rest, self.weights[id as usize]);
        }
        Ok(builder.build())
    }

    /// `H_j`: every edge replaced by its j-subsets, weights summed over the
    /// edges containing each j-set.
    pub fn derived(&self, j: usize) -> Result<WeightedHypergraph> {
        if j == 0 || j > self.k {
            return invalid(format!("j = {j} outside 1..={}", self.k));
        }
        if j == self.k {
            return Ok(self.clone());
        }
        let mut builder = HypergraphBuilder::new(self.n, j)?;
        for (edge, w) in self.edges() {
            for_each_subset(edge, j, |s| builder.insert_sorted(s.to_vec(), w));
        }
        Ok(builder.build())
    }

    /// `L^H(m) = e(H) (m)_k / (N)_k`, the mean edge count of a uniform
    /// m-subset.
    pub fn expected_count(&self, m: u32) -> Result<f64> {
        self.expected_count_exact::<f64>(m)
    }

    pub fn expected_count_exact<T: Scalar>(&self, m: u32) -> Result<T> {
        if m > self.n {
            return invalid(format!("m = {m} exceeds N = {}", self.n));
        }
        let ratio: T = falling_ratio(m as i64, self.n as i64, self.k);
        Ok(self.total_weight_exact::<T>() * ratio)
    }

    /// `D^H(B_m) = N^H(B) - L^H(|B|)`.
    pub fn deviation_m(&self, members: &[Vertex]) -> Result<f64> {
        let set = self.subset(members)?;
        Ok(self.count_in(&set) - self.expected_count(set.len() as u32)?)
    }

    pub fn deviation_m_exact<T: Scalar>(&self, members: &[Vertex]) -> Result<T> {
        let set = self.subset(members)?;
        Ok(self.count_in_exact::<T>(&set) - self.expected_count_exact::<T>(set.len() as u32)?)
    }

    /// `D^H(B_p) = N^H(B) - p^k e(H)`.
    pub fn deviation_p(&self, members: &[Vertex], p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return invalid(format!("p = {p} outside (0, 1)"));
        }
        Ok(self.edge_count_in_subset(members)? - p.powi(self.k as i32) * self.total_weight())
    }
}

/// Calls `f` with every `r`-subset of the sorted slice `items`, in
/// lexicographic order.
pub fn for_each_subset<F: FnMut(&[Vertex])>(items: &[Vertex], r: usize, mut f: F) {
    let n = items.len();
    if r > n {
        return;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    let mut buf: Vec<Vertex> = idx.iter().map(|&i| items[i]).collect();
    loop {
        f(&buf);
        let Some(pos) = (0..r).rev().find(|&p| idx[p] != p + n - r) else {
            return;
        };
        idx[pos] += 1;
        for q in pos + 1..r {
            idx[q] = idx[q - 1] + 1;
        }
        for q in pos..r {
            buf[q] = items[idx[q]];
        }
    }
}

/// A vertex subset of `1..=n` prepared for fast membership tests.
#[derive(Clone, Debug)]
pub struct VertexSet {
    n: u32,
    members: Vec<Vertex>,
    mask: Option<Vec<u64>>,
}

impl VertexSet {
    pub fn new(n: u32, members: &[Vertex]) -> Result<Self> {
        Self::with_threshold(n, members, DEFAULT_MASK_THRESHOLD)
    }

    /// Uses a bitmask when `n <= mask_threshold`, binary search otherwise.
    pub fn with_threshold(n: u32, members: &[Vertex], mask_threshold: u32) -> Result<Self> {
        let mut sorted = members.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if let Some(&v) = sorted.iter().find(|&&v| v == 0 || v > n) {
            return invalid(format!("vertex {v} outside 1..={n}"));
        }
        let mask = (n <= mask_threshold).then(|| {
            let mut words = vec![0u64; (n as usize).div_ceil(64)];
            for &v in &sorted {
                let b = (v - 1) as usize;
                words[b / 64] |= 1 << (b % 64);
            }
            words
        });
        Ok(Self {
            n,
            members: sorted,
            mask,
        })
    }

    #[inline]
    pub fn contains(&self, v: Vertex) -> bool {
        match &self.mask {
            Some(words) => {
                let b = (v - 1) as usize;
                words[b / 64] >> (b % 64) & 1 == 1
            }
            None => self.members.binary_search(&v).is_ok(),
        }
    }

    /// Sorted, deduplicated members.
    pub fn members(&self) -> &[Vertex] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn universe(&self) -> u32 {
        self.n
    }
}

/// How a random subset was drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum SubsetModel {
    /// Uniform over m-element subsets.
    UniformM { m: u32 },
    /// Each vertex independently with probability p.
    BinomialP { p: f64 },
}

impl SubsetModel {
    /// Mean of `N^H(B)` under this model.
    pub fn mean_count(&self, h: &WeightedHypergraph) -> Result<f64> {
        match *self {
            SubsetModel::UniformM { m } => h.expected_count(m),
            SubsetModel::BinomialP { p } => Ok(p.powi(h.k() as i32) * h.total_weight()),
        }
    }

    pub fn validate(&self, n: u32) -> Result<()> {
        match *self {
            SubsetModel::UniformM { m } if m > n => invalid(format!("m = {m} exceeds N = {n}")),
            SubsetModel::BinomialP { p } if !(p > 0.0 && p < 1.0) => {
                invalid(format!("p = {p} outside (0, 1)"))
            }
            _ => Ok(()),
        }
    }
}

/// A concrete subset together with the model it was drawn from.
#[derive(Clone, Debug)]
pub struct SubsetSelection {
    pub members: VertexSet,
    pub model: SubsetModel,
}

impl SubsetSelection {
    pub fn new(n: u32, members: &[Vertex], model: SubsetModel) -> Result<Self> {
        model.validate(n)?;
        let members = VertexSet::new(n, members)?;
        if let SubsetModel::UniformM { m } = model {
            if members.len() != m as usize {
                return invalid(format!(
                    "uniform-m selection has {} members, expected {m}",
                    members.len()
                ));
            }
        }
        Ok(Self { members, model })
    }

    pub fn deviation(&self, h: &WeightedHypergraph) -> Result<f64> {
        Ok(h.count_in(&self.members) - self.model.mean_count(h)?)
    }
}

/// Degree statistics of a hypergraph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub n: u32,
    pub k: usize,
    /// `e(H)`.
    pub total_weight: f64,
    /// `d̄ = k e(H) / N`.
    pub mean_degree: f64,
    /// `σ²`, the population variance of the degrees (degree-0 vertices
    /// included).
    pub degree_variance: f64,
    /// `N⁻¹ Σ d(x)²`.
    pub degree_second_moment: f64,
    /// `Δ_r` for `r = 1..=k`, stored at index `r - 1`.
    pub max_r_degree: Vec<f64>,
}

impl DegreeStats {
    pub fn from_degrees(degrees: &[f64], k: usize, total_weight: f64, max_r_degree: Vec<f64>) -> Self {
        let n = degrees.len();
        let nf = n as f64;
        let mean = k as f64 * total_weight / nf;
        let second = degrees.iter().map(|d| d * d).sum::<f64>() / nf;
        let variance = degrees.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / nf;
        Self {
            n: n as u32,
            k,
            total_weight,
            mean_degree: mean,
            degree_variance: variance,
            degree_second_moment: second,
            max_r_degree,
        }
    }

    /// `Δ_r`, or `None` outside `1..=k`.
    pub fn delta(&self, r: usize) -> Option<f64> {
        r.checked_sub(1).and_then(|i| self.max_r_degree.get(i)).copied()
    }

    /// Smallest `r >= 2` with `Δ_r <= bound`, the parameter the rate windows
    /// are stated in.
    pub fn bounded_degree_order(&self, bound: f64) -> Option<usize> {
        (2..=self.k).find(|&r| self.delta(r).is_some_and(|d| d <= bound))
    }
}
