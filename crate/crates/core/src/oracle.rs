//! Exact distributions of `N^H(B)` by exhaustive enumeration.
//!
//! Subsets of a fixed size are visited in revolving-door order, so
//! consecutive subsets differ by one swap and the count is updated from
//! the incidence lists of the two vertices involved. Weights are scaled by a
//! common power of two and summed as integers, so the result is exact.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::hypergraph::{Vertex, WeightedHypergraph};
use crate::scalar::{binomial_u128, rational_from_u128, rational_string, Scalar};

/// Default cap on the number of subsets visited.
pub const DEFAULT_ENUMERATION_LIMIT: u128 = 20_000_000;

const CHUNK: u128 = 1 << 16;

/// Probability mass function over count values, both exact.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Pmf {
    pub mass: BTreeMap<BigRational, BigRational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Mass at values `>= threshold`.
    Upper,
    /// Mass at values `<= threshold`.
    Lower,
}

impl Pmf {
    pub fn point(value: BigRational) -> Self {
        Self {
            mass: BTreeMap::from([(value, BigRational::one())]),
        }
    }

    pub fn total(&self) -> BigRational {
        self.mass.values().fold(BigRational::zero(), |a, p| a + p)
    }

    pub fn mean(&self) -> BigRational {
        self.mass.iter().fold(BigRational::zero(), |a, (v, p)| a + v * p)
    }

    pub fn variance(&self) -> BigRational {
        let mean = self.mean();
        self.mass.iter().fold(BigRational::zero(), |a, (v, p)| {
            let d = v - &mean;
            a + &d * &d * p
        })
    }

    /// `{value: probability}` with both sides written as exact rationals.
    pub fn to_json_map(&self) -> BTreeMap<String, String> {
        self.mass
            .iter()
            .map(|(v, p)| (rational_string(v), rational_string(p)))
            .collect()
    }

    fn add_scaled(&mut self, other: &Pmf, factor: &BigRational) {
        for (v, p) in &other.mass {
            let slot = self.mass.entry(v.clone()).or_insert_with(BigRational::zero);
            *slot += p * factor;
        }
    }
}

/// Mass of `pmf` at or beyond `threshold` on the given side.
pub fn exact_tail(pmf: &Pmf, threshold: &BigRational, side: Side) -> BigRational {
    let iter: Box<dyn Iterator<Item = (&BigRational, &BigRational)>> = match side {
        Side::Upper => Box::new(pmf.mass.range(threshold.clone()..)),
        Side::Lower => Box::new(pmf.mass.range(..=threshold.clone())),
    };
    iter.fold(BigRational::zero(), |a, (_, p)| a + p)
}

/// Edge weights as integers `w · 2^shift`.
struct ScaledWeights {
    values: Vec<i128>,
    shift: u32,
}

impl ScaledWeights {
    fn new(h: &WeightedHypergraph) -> Result<Self> {
        let mut shift = 0u32;
        for id in 0..h.edge_count() {
            let w = h.weight(id);
            let q = BigRational::from_weight(w);
            let den = q.denom();
            // Denominators of finite floats are powers of two.
            let bits = den.bits().saturating_sub(1) as u32;
            shift = shift.max(bits);
        }
        let scale = BigRational::from_integer(BigInt::one() << shift);
        let mut values = Vec::with_capacity(h.edge_count());
        let mut total = BigInt::zero();
        for id in 0..h.edge_count() {
            let scaled = BigRational::from_weight(h.weight(id)) * &scale;
            total += scaled.to_integer().abs();
            values.push(scaled.to_integer().to_i128().ok_or_else(too_fine)?);
        }
        if total.bits() > 126 {
            return Err(too_fine());
        }
        Ok(Self { values, shift })
    }

    fn to_value(&self, scaled: i128) -> BigRational {
        BigRational::new(BigInt::from(scaled), BigInt::one() << self.shift)
    }
}

fn too_fine() -> Error {
    Error::InvalidInput("edge weights span too many binary digits for exact enumeration".into())
}

fn check_limit(required: u128, limit: u128) -> Result<()> {
    if required > limit {
        return Err(Error::ResourceLimit { required, limit });
    }
    Ok(())
}

/// Revolving-door rank of the sorted 0-based subset `c_1 < ... < c_t`.
pub fn revolving_door_rank(subset: &[u32]) -> u128 {
    let t = subset.len();
    let mut r: i128 = -((t % 2) as i128);
    let mut sign = 1i128;
    for i in (1..=t).rev() {
        let c = binomial_u128(subset[i - 1] as u64 + 1, i as u64).unwrap_or(0) as i128;
        r += sign * c;
        sign = -sign;
    }
    r as u128
}

/// Inverse of [`revolving_door_rank`] over `t`-subsets of `0..n`.
pub fn revolving_door_unrank(n: u32, t: usize, rank: u128) -> Vec<u32> {
    let mut out = vec![0u32; t];
    let mut r = rank as i128;
    let mut x = n as i128;
    for i in (1..=t).rev() {
        while binomial_u128(x as u64, i as u64).unwrap_or(0) as i128 > r {
            x -= 1;
        }
        out[i - 1] = x as u32;
        r = binomial_u128(x as u64 + 1, i as u64).unwrap_or(0) as i128 - r - 1;
    }
    out
}

/// Steps `c` (sorted, 0-based, `c[t] = n` sentinel) to its revolving-door
/// successor. Returns the `(removed, added)` pair, or `None` after the last
/// subset.
pub(crate) fn revolving_door_next(c: &mut [u32]) -> Option<(u32, u32)> {
    let t = c.len() - 1;
    if t == 0 {
        return None;
    }
    // 1-based positions: c_j lives at c[j - 1].
    let mut increase = if t % 2 == 1 {
        if c[0] + 1 < c[1] {
            c[0] += 1;
            return Some((c[0] - 1, c[0]));
        }
        false
    } else {
        if c[0] > 0 {
            c[0] -= 1;
            return Some((c[0] + 1, c[0]));
        }
        true
    };
    let mut j = 2;
    while j <= t {
        if increase {
            // c_{j-1} = j - 2.
            if c[j - 1] + 1 < c[j] {
                let removed = c[j - 2];
                c[j - 2] = c[j - 1];
                c[j - 1] += 1;
                return Some((removed, c[j - 1]));
            }
        } else if c[j - 1] as usize >= j {
            // c_j = c_{j-1} + 1.
            let removed = c[j - 1];
            c[j - 1] = c[j - 2];
            c[j - 2] = (j - 2) as u32;
            return Some((removed, c[j - 2]));
        }
        j += 1;
        increase = !increase;
    }
    None
}

/// Tallies of scaled counts over a range of revolving-door ranks.
fn enumerate_range(
    h: &WeightedHypergraph,
    weights: &ScaledWeights,
    m: usize,
    start: u128,
    len: u128,
) -> HashMap<i128, u64> {
    let n = h.n();
    let k = h.k();
    let mut c = revolving_door_unrank(n, m, start);
    c.push(n);
    let mut occupancy = vec![0u8; h.edge_count()];
    let mut count: i128 = 0;
    for &v in &c[..m] {
        count += add_vertex(h, weights, &mut occupancy, k, v + 1);
    }
    let mut tally: HashMap<i128, u64> = HashMap::new();
    *tally.entry(count).or_default() += 1;
    for _ in 1..len {
        let (out, into) = revolving_door_next(&mut c).expect("range lies inside the enumeration");
        count -= remove_vertex(h, weights, &mut occupancy, k, out + 1);
        count += add_vertex(h, weights, &mut occupancy, k, into + 1);
        *tally.entry(count).or_default() += 1;
    }
    tally
}

#[inline]
fn add_vertex(h: &WeightedHypergraph, w: &ScaledWeights, occ: &mut [u8], k: usize, v: Vertex) -> i128 {
    let mut gained = 0;
    for &id in h.incident(v) {
        let slot = &mut occ[id as usize];
        *slot += 1;
        if *slot as usize == k {
            gained += w.values[id as usize];
        }
    }
    gained
}

#[inline]
fn remove_vertex(h: &WeightedHypergraph, w: &ScaledWeights, occ: &mut [u8], k: usize, v: Vertex) -> i128 {
    let mut lost = 0;
    for &id in h.incident(v) {
        let slot = &mut occ[id as usize];
        if *slot as usize == k {
            lost += w.values[id as usize];
        }
        *slot -= 1;
    }
    lost
}

fn distribution_m_unchecked(h: &WeightedHypergraph, weights: &ScaledWeights, m: usize) -> Pmf {
    let n = h.n();
    let total = binomial_u128(n as u64, m as u64).expect("checked against the limit");
    let chunks: Vec<(u128, u128)> = (0..total.div_ceil(CHUNK))
        .map(|i| (i * CHUNK, CHUNK.min(total - i * CHUNK)))
        .collect();
    let tallies: Vec<HashMap<i128, u64>> = chunks
        .par_iter()
        .map(|&(start, len)| enumerate_range(h, weights, m, start, len))
        .collect();
    let mut merged: BTreeMap<i128, u128> = BTreeMap::new();
    for t in tallies {
        for (v, c) in t {
            *merged.entry(v).or_default() += c as u128;
        }
    }
    let denom = rational_from_u128(total);
    Pmf {
        mass: merged
            .into_iter()
            .map(|(v, c)| (weights.to_value(v), rational_from_u128(c) / &denom))
            .collect(),
    }
}

/// Distribution of `N^H(B_m)` over all `C(N, m)` subsets. Refuses when
/// `C(N, m)` exceeds `limit`.
pub fn exact_distribution_m(h: &WeightedHypergraph, m: u32, limit: u128) -> Result<Pmf> {
    if m > h.n() {
        return invalid(format!("m = {m} exceeds N = {}", h.n()));
    }
    let required = binomial_u128(h.n() as u64, m as u64).unwrap_or(u128::MAX);
    check_limit(required, limit)?;
    let weights = ScaledWeights::new(h)?;
    Ok(distribution_m_unchecked(h, &weights, m as usize))
}

/// Distribution of `N^H(B_p)` as the binomial mixture of the fixed-size
/// distributions. Refuses when the subsets to visit exceed `limit`.
pub fn exact_distribution_p(h: &WeightedHypergraph, p: &BigRational, limit: u128) -> Result<Pmf> {
    if p.is_negative() || p > &BigRational::one() {
        return invalid(format!("p = {} outside [0, 1]", rational_string(p)));
    }
    let n = h.n();
    let q = BigRational::one() - p;
    let active: Vec<u32> = (0..=n)
        .filter(|&m| {
            let pw = p.is_zero() && m > 0 || q.is_zero() && m < n;
            !pw
        })
        .collect();
    let required = active
        .iter()
        .map(|&m| binomial_u128(n as u64, m as u64).unwrap_or(u128::MAX))
        .fold(0u128, u128::saturating_add);
    check_limit(required, limit)?;
    let weights = ScaledWeights::new(h)?;
    let mut out = Pmf::default();
    for m in active {
        let b = binomial_u128(n as u64, m as u64).expect("bounded by the limit");
        let w = rational_from_u128(b) * pow(p, m) * pow(&q, n - m);
        out.add_scaled(&distribution_m_unchecked(h, &weights, m as usize), &w);
    }
    out.mass.retain(|_, v| !v.is_zero());
    Ok(out)
}

fn pow(x: &BigRational, e: u32) -> BigRational {
    (0..e).fold(BigRational::one(), |a, _| a * x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_ap, gen_sidon};
    use crate::hypergraph::{for_each_subset, VertexSet};
    use crate::scalar::parse_rational;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn walk(n: u32, t: usize) -> Vec<Vec<u32>> {
        let mut c: Vec<u32> = (0..t as u32).collect();
        c.push(n);
        let mut out = vec![c[..t].to_vec()];
        while let Some((removed, added)) = revolving_door_next(&mut c) {
            let prev = out.last().unwrap();
            assert!(prev.contains(&removed) && !prev.contains(&added));
            let mut expect: Vec<u32> = prev.iter().copied().filter(|&v| v != removed).collect();
            expect.push(added);
            expect.sort_unstable();
            assert_eq!(expect, c[..t]);
            out.push(c[..t].to_vec());
        }
        out
    }

    #[test]
    fn revolving_door_visits_every_subset_once() {
        for n in 1..=9u32 {
            for t in 1..=n as usize {
                let seq = walk(n, t);
                assert_eq!(seq.len() as u128, binomial_u128(n as u64, t as u64).unwrap(), "n={n} t={t}");
                let mut sorted = seq.clone();
                sorted.sort();
                sorted.dedup();
                assert_eq!(sorted.len(), seq.len());
                for (r, s) in seq.iter().enumerate() {
                    assert_eq!(revolving_door_rank(s), r as u128, "n={n} t={t} {s:?}");
                    assert_eq!(&revolving_door_unrank(n, t, r as u128), s);
                }
            }
        }
    }

    #[test]
    fn small_progression_distribution() {
        let h = gen_ap(5, 3).unwrap();
        let pmf = exact_distribution_m(&h, 3, DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert_eq!(pmf.mass.len(), 2);
        assert_eq!(pmf.mass[&q(0, 1)], q(6, 10));
        assert_eq!(pmf.mass[&q(1, 1)], q(4, 10));
        let full = exact_distribution_m(&h, 5, DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert_eq!(full, Pmf::point(q(4, 1)));
        let empty = exact_distribution_m(&h, 0, DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert_eq!(empty, Pmf::point(q(0, 1)));
    }

    #[test]
    fn mean_and_variance_match_direct_enumeration() {
        let h = gen_ap(12, 3).unwrap();
        let pmf = exact_distribution_m(&h, 6, DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert_eq!(pmf.total(), BigRational::one());
        assert_eq!(pmf.mean(), h.expected_count_exact::<BigRational>(6).unwrap());

        let all: Vec<Vertex> = (1..=12).collect();
        let (mut s1, mut s2, mut count) = (BigRational::zero(), BigRational::zero(), 0i64);
        for_each_subset(&all, 6, |b| {
            let v: BigRational = h.count_in_exact(&VertexSet::new(12, b).unwrap());
            s1 += &v;
            s2 += &v * &v;
            count += 1;
        });
        let c = BigRational::from_int(count);
        let mean = &s1 / &c;
        assert_eq!(pmf.variance(), &s2 / &c - &mean * &mean);
    }

    #[test]
    fn fractional_weights_stay_exact() {
        let h = WeightedHypergraph::from_edges(6, 2, [([1, 2], 0.1), ([2, 3], 2.5), ([1, 3], 1.0)]).unwrap();
        let pmf = exact_distribution_m(&h, 3, DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert_eq!(pmf.total(), BigRational::one());
        assert_eq!(pmf.mean(), h.expected_count_exact::<BigRational>(3).unwrap());
        assert!(pmf.mass.contains_key(&(BigRational::from_weight(0.1) + q(7, 2))));
    }

    #[test]
    fn binomial_mixture() {
        let h = gen_sidon(4).unwrap();
        let pmf = exact_distribution_p(&h, &q(1, 2), DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert_eq!(pmf.mass[&q(1, 1)], q(1, 16));
        assert_eq!(exact_distribution_p(&h, &q(1, 1), 1).unwrap(), Pmf::point(q(1, 1)));

        let h = gen_ap(9, 3).unwrap();
        let p = parse_rational("0.3").unwrap();
        let pmf = exact_distribution_p(&h, &p, DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert_eq!(pmf.total(), BigRational::one());
        assert_eq!(pmf.mean(), pow(&p, 3) * h.total_weight_exact::<BigRational>());
        // Mean equals the binomial average of L(m).
        let qq = BigRational::one() - &p;
        let avg = (0..=9u32).fold(BigRational::zero(), |a, m| {
            let b = rational_from_u128(binomial_u128(9, m as u64).unwrap());
            a + b * pow(&p, m) * pow(&qq, 9 - m) * h.expected_count_exact::<BigRational>(m).unwrap()
        });
        assert_eq!(pmf.mean(), avg);
        assert!(exact_distribution_p(&h, &q(3, 2), DEFAULT_ENUMERATION_LIMIT).is_err());
    }

    #[test]
    fn tails() {
        let h = gen_ap(8, 3).unwrap();
        let pmf = exact_distribution_m(&h, 4, DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert_eq!(exact_tail(&pmf, &q(100, 1), Side::Upper), BigRational::zero());
        assert_eq!(exact_tail(&pmf, &q(-1, 1), Side::Upper), BigRational::one());
        let t = q(2, 1);
        let interior = pmf
            .mass
            .iter()
            .filter(|(v, _)| **v > q(1, 1) && **v < q(3, 1))
            .fold(BigRational::zero(), |a, (_, p)| a + p);
        let upper = exact_tail(&pmf, &q(3, 1), Side::Upper);
        let lower = exact_tail(&pmf, &q(1, 1), Side::Lower);
        assert_eq!(upper + lower + interior, BigRational::one());
        assert!(exact_tail(&pmf, &t, Side::Upper) > BigRational::zero());
    }

    #[test]
    fn refuses_beyond_limit() {
        let h = gen_ap(30, 3).unwrap();
        match exact_distribution_m(&h, 15, 1000) {
            Err(Error::ResourceLimit { required, limit }) => {
                assert_eq!(required, 155_117_520);
                assert_eq!(limit, 1000);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            exact_distribution_p(&h, &q(1, 3), 1 << 20),
            Err(Error::ResourceLimit { .. })
        ));
    }
}
