//! Martingale decomposition of `D^H(B_m)` along a vertex ordering.
//!
//! For a prefix `b_1, ..., b_m` of a random permutation, step `i` adds `b_i`
//! to `B_{i-1}`. The increment `A_l(B_i)` counts pairs `(S, f)` with
//! `|S| = l`, `b_i ∈ S ⊆ f ∩ B_i`, weighted by `f`. Equivalently it is the
//! weighted count of `(l-1)`-subsets of `f \ {b_i}` inside `B_{i-1}`, summed
//! over edges `f` through `b_i`. `X_l` centres `A_l` on its conditional mean
//! given `B_{i-1}`, and
//!
//! ```text
//! D(B_m) = Σ_{i ≤ m} Σ_{l ≤ k} (N-m)_l (m-i)_{k-l} / (N-i)_k · X_l(B_i)
//! ```
//!
//! holds exactly whenever `m <= N - k`. Everything here is generic over
//! [`Scalar`] so the identity can be checked in exact rational arithmetic.

use std::io::Write;

use log::warn;
use rand::Rng;

use crate::error::{invalid, Result};
use crate::hypergraph::{Vertex, WeightedHypergraph};
use crate::scalar::{binomial, falling, falling_ratio, Scalar};

/// First `m` entries of an ordering of `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedPrefix {
    n: u32,
    order: Vec<Vertex>,
}

impl OrderedPrefix {
    pub fn new(n: u32, order: Vec<Vertex>) -> Result<Self> {
        if order.len() > n as usize {
            return invalid(format!("prefix of length {} exceeds N = {n}", order.len()));
        }
        let mut seen = vec![false; n as usize];
        for &v in &order {
            if v == 0 || v > n {
                return invalid(format!("vertex {v} outside 1..={n}"));
            }
            if std::mem::replace(&mut seen[(v - 1) as usize], true) {
                return invalid(format!("vertex {v} repeated in prefix"));
            }
        }
        Ok(Self { n, order })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn order(&self) -> &[Vertex] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// First `m` entries of a uniformly random permutation of `1..=n`, by
/// partial Fisher–Yates.
pub fn sample_prefix<R: Rng + ?Sized>(n: u32, m: u32, rng: &mut R) -> Result<OrderedPrefix> {
    if m > n {
        return invalid(format!("m = {m} exceeds N = {n}"));
    }
    let mut buf: Vec<Vertex> = (1..=n).collect();
    for i in 0..m as usize {
        let j = rng.random_range(i..n as usize);
        buf.swap(i, j);
    }
    buf.truncate(m as usize);
    Ok(OrderedPrefix { n, order: buf })
}

/// How `E[A_l(B_i) | B_{i-1}]` is obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CondMeanMode {
    /// Weight histogram over edge occupancy `|f ∩ B|`, updated in
    /// `O(deg(b_i))` per step.
    #[default]
    Incremental,
    /// Sums `A_l(B_{i-1} ∪ {x})` over every `x ∉ B_{i-1}` from the incidence
    /// lists. `O(Σ_x deg(x))` per step.
    Naive,
}

/// Per-step quantities along one prefix. Vectors indexed `[l - 1][i - 1]`
/// or `[i - 1]`.
///
/// `kappa_prime`, `lambda_partial` and `qvar_partial` involve `1 / (1 - i/N)`
/// and are left empty when the prefix has length `N`.
#[derive(Clone, Debug)]
pub struct Decomposition<T> {
    pub n: u32,
    pub k: usize,
    pub m: usize,
    pub a: Vec<Vec<T>>,
    pub cond_mean: Vec<Vec<T>>,
    pub x: Vec<Vec<T>>,
    pub y: Vec<Vec<T>>,
    pub kappa: Vec<T>,
    pub kappa_prime: Vec<T>,
    pub lambda_partial: Vec<T>,
    pub qvar_partial: Vec<T>,
}

/// Coefficient `(N-m)_l (m-i)_{k-l} / (N-i)_k` of `X_l(B_i)`, taken as zero
/// whenever the numerator vanishes (including the `0/0` cases at `i > N - k`).
pub fn martingale_coefficient<T: Scalar>(n: u32, k: usize, m: usize, i: usize, l: usize) -> T {
    let (n, m, i) = (n as i64, m as i64, i as i64);
    let num: T = falling::<T>(n - m, l) * falling::<T>(m - i, k - l);
    if num.is_zero() {
        return num;
    }
    num / falling::<T>(n - i, k)
}

/// `C(k-1, l-1) (i-1)_{l-1} / (N-1)_{l-1}`, the multiple of `X_1` that
/// `X_l` tracks.
pub fn residual_factor<T: Scalar>(n: u32, k: usize, i: usize, l: usize) -> T {
    binomial::<T>(k - 1, l - 1) * falling_ratio::<T>(i as i64 - 1, n as i64 - 1, l - 1)
}

/// `t^{k-1} (1-t) / (1-s)` with `t = m/N`, `s = i/N`, as the exact ratio
/// `m^{k-1} (N-m) / (N^{k-1} (N-i))`. Requires `i < N`.
pub fn lambda_coefficient<T: Scalar>(n: u32, k: usize, m: usize, i: usize) -> T {
    let nn = T::from_int(n as i64);
    let mut num = T::from_int((n as usize - m) as i64);
    let mut den = T::from_int((n as usize - i) as i64);
    for _ in 1..k {
        num = num * T::from_int(m as i64);
        den = den * nn.clone();
    }
    num / den
}

/// `κ(i, m) = Σ_l (N-m)_l (m-i)_{k-l}/(N-i)_k · C(k-1,l-1) (i-1)_{l-1}/(N-1)_{l-1}`,
/// the coefficient of `X_1(B_i)` once every `X_l` is replaced by its
/// degree-driven part.
pub fn kappa_exact<T: Scalar>(i: usize, m: usize, n: u32, k: usize) -> Result<T> {
    check_kappa_args(i, m, n)?;
    Ok((1..=k).fold(T::zero(), |acc, l| {
        acc + martingale_coefficient::<T>(n, k, m, i, l) * residual_factor::<T>(n, k, i, l)
    }))
}

pub fn kappa(i: usize, m: usize, n: u32, k: usize) -> Result<f64> {
    check_kappa_args(i, m, n)?;
    // Factor-by-factor ratios keep large N in range.
    let (nf, mf, fi) = (n as f64, m as f64, i as f64);
    let mut total = 0.0;
    for l in 1..=k {
        if m + l > n as usize || (m - i) < k - l {
            continue;
        }
        let mut term = 1.0;
        let mut den_step = 0.0;
        for j in 0..l {
            term *= (nf - mf - j as f64) / (nf - fi - den_step);
            den_step += 1.0;
        }
        for j in 0..k - l {
            term *= (mf - fi - j as f64) / (nf - fi - den_step);
            den_step += 1.0;
        }
        let binom: f64 = binomial(k - 1, l - 1);
        let mut ratio = 1.0;
        for j in 0..l - 1 {
            ratio *= (fi - 1.0 - j as f64) / (nf - 1.0 - j as f64);
        }
        total += term * binom * ratio;
    }
    Ok(total)
}

/// `κ'(i, m) = t^{k-1}(1-t)/(1-s)`, the coefficient used by the degree
/// process.
pub fn kappa_prime(i: usize, m: usize, n: u32, k: usize) -> Result<f64> {
    check_kappa_args(i, m, n)?;
    if i >= n as usize {
        return invalid("κ' is undefined at i = N");
    }
    let t = m as f64 / n as f64;
    let s = i as f64 / n as f64;
    Ok(t.powi(k as i32 - 1) * (1.0 - t) / (1.0 - s))
}

/// The binomial-theorem expansion
/// `Σ_l (1-t)^l (t-s)^{k-l} (1-s)^{-k} C(k-1,l-1) s^{l-1}` of `κ'`.
pub fn kappa_prime_expansion(i: usize, m: usize, n: u32, k: usize) -> Result<f64> {
    check_kappa_args(i, m, n)?;
    if i >= n as usize {
        return invalid("κ' is undefined at i = N");
    }
    let t = m as f64 / n as f64;
    let s = i as f64 / n as f64;
    let scale = (1.0 - s).powi(-(k as i32));
    Ok((1..=k)
        .map(|l| {
            let b: f64 = binomial(k - 1, l - 1);
            (1.0 - t).powi(l as i32) * (t - s).powi((k - l) as i32) * b * s.powi(l as i32 - 1)
        })
        .sum::<f64>()
        * scale)
}

fn check_kappa_args(i: usize, m: usize, n: u32) -> Result<()> {
    if i == 0 {
        return invalid("step index i starts at 1");
    }
    if i > m {
        return invalid(format!("i = {i} exceeds m = {m}"));
    }
    if m > n as usize {
        return invalid(format!("m = {m} exceeds N = {n}"));
    }
    Ok(())
}

fn check_prefix(h: &WeightedHypergraph, prefix: &OrderedPrefix) -> Result<()> {
    if prefix.n() != h.n() {
        return invalid(format!(
            "prefix is over {} vertices, hypergraph over {}",
            prefix.n(),
            h.n()
        ));
    }
    Ok(())
}

/// Computes the full decomposition along `prefix`.
pub fn decompose<T: Scalar>(
    h: &WeightedHypergraph,
    prefix: &OrderedPrefix,
    mode: CondMeanMode,
) -> Result<Decomposition<T>> {
    check_prefix(h, prefix)?;
    let n = h.n();
    let k = h.k();
    let m = prefix.len();
    if m > n as usize / 2 && m < n as usize {
        warn!("prefix density m/N = {m}/{n} exceeds 1/2; rate predictions assume t <= 1/2");
    }
    let weights: Vec<T> = (0..h.edge_count()).map(|id| T::from_weight(h.weight(id))).collect();
    let degrees: Vec<T> = (1..=n)
        .map(|x| {
            h.incident(x)
                .iter()
                .fold(T::zero(), |acc, &id| acc + weights[id as usize].clone())
        })
        .collect();

    // occupancy[e] = |e ∩ B|; by_occupancy[j] = total weight of edges with
    // occupancy j.
    let mut occupancy = vec![0u8; h.edge_count()];
    let mut by_occupancy = vec![T::zero(); k + 1];
    by_occupancy[0] = weights.iter().fold(T::zero(), |acc, w| acc + w.clone());
    let mut in_b = vec![false; n as usize];

    let binom: Vec<Vec<T>> = (0..=k)
        .map(|j| (0..k).map(|l1| binomial::<T>(j, l1)).collect())
        .collect();

    let mut removed_deg = T::zero();
    let mut removed_deg_sq = T::zero();
    let total_deg = degrees.iter().fold(T::zero(), |acc, d| acc + d.clone());
    let total_deg_sq = degrees
        .iter()
        .fold(T::zero(), |acc, d| acc + d.clone() * d.clone());

    let with_lambda = m < n as usize;
    let mut out = Decomposition {
        n,
        k,
        m,
        a: vec![Vec::with_capacity(m); k],
        cond_mean: vec![Vec::with_capacity(m); k],
        x: vec![Vec::with_capacity(m); k],
        y: vec![Vec::with_capacity(m); k],
        kappa: Vec::with_capacity(m),
        kappa_prime: Vec::new(),
        lambda_partial: Vec::new(),
        qvar_partial: Vec::new(),
    };
    let mut lambda = T::zero();
    let mut qvar = T::zero();
    let mut a_step = vec![T::zero(); k];
    let mut cm_step = vec![T::zero(); k];

    for (idx, &b) in prefix.order().iter().enumerate() {
        let i = idx + 1;
        let remaining = T::from_int((n as usize - i + 1) as i64);

        match mode {
            CondMeanMode::Incremental => {
                for (l1, slot) in cm_step.iter_mut().enumerate() {
                    *slot = (0..=k).fold(T::zero(), |acc, j| {
                        acc + by_occupancy[j].clone()
                            * T::from_int((k - j) as i64)
                            * binom[j][l1].clone()
                    });
                }
            }
            CondMeanMode::Naive => {
                cm_step.iter_mut().for_each(|s| *s = T::zero());
                for x in (1..=n).filter(|&x| !in_b[(x - 1) as usize]) {
                    for &id in h.incident(x) {
                        let j = occupancy[id as usize] as usize;
                        for (l1, slot) in cm_step.iter_mut().enumerate() {
                            *slot = slot.clone() + weights[id as usize].clone() * binom[j][l1].clone();
                        }
                    }
                }
            }
        }
        for slot in cm_step.iter_mut() {
            *slot = slot.clone() / remaining.clone();
        }

        a_step.iter_mut().for_each(|s| *s = T::zero());
        for &id in h.incident(b) {
            let id = id as usize;
            let j = occupancy[id] as usize;
            for (l1, slot) in a_step.iter_mut().enumerate() {
                *slot = slot.clone() + weights[id].clone() * binom[j][l1].clone();
            }
            by_occupancy[j] = by_occupancy[j].clone() - weights[id].clone();
            by_occupancy[j + 1] = by_occupancy[j + 1].clone() + weights[id].clone();
            occupancy[id] += 1;
        }
        in_b[(b - 1) as usize] = true;

        let x1 = a_step[0].clone() - cm_step[0].clone();
        for l1 in 0..k {
            let xl = a_step[l1].clone() - cm_step[l1].clone();
            let yl = xl.clone() - residual_factor::<T>(n, k, i, l1 + 1) * x1.clone();
            out.a[l1].push(a_step[l1].clone());
            out.cond_mean[l1].push(cm_step[l1].clone());
            out.x[l1].push(xl);
            out.y[l1].push(yl);
        }
        out.kappa.push(kappa_exact::<T>(i, m, n, k)?);

        if with_lambda {
            // Variance of the degrees of the vertices still outside B_{i-1}.
            let s1 = total_deg.clone() - removed_deg.clone();
            let s2 = total_deg_sq.clone() - removed_deg_sq.clone();
            let mean = s1 / remaining.clone();
            let cond_var = s2 / remaining.clone() - mean.clone() * mean;
            let c = lambda_coefficient::<T>(n, k, m, i);
            lambda = lambda + c.clone() * x1.clone();
            qvar = qvar + c.clone() * c.clone() * cond_var;
            out.kappa_prime.push(c);
            out.lambda_partial.push(lambda.clone());
            out.qvar_partial.push(qvar.clone());
        }
        let d = degrees[(b - 1) as usize].clone();
        removed_deg = removed_deg + d.clone();
        removed_deg_sq = removed_deg_sq + d.clone() * d;
    }
    Ok(out)
}

impl<T: Scalar> Decomposition<T> {
    /// `Σ_i Σ_l (N-m)_l (m-i)_{k-l}/(N-i)_k · X_l(B_i)`.
    ///
    /// Defined for `m <= N - k` and for `m = N`. In between, steps with
    /// `N - i < k` have coefficient `0/0` and the sum no longer equals the
    /// deviation.
    pub fn reconstruction(&self) -> Result<T> {
        check_reconstruction_range(self.n, self.k, self.m)?;
        let mut total = T::zero();
        for i in 1..=self.m {
            for l in 1..=self.k {
                let c = martingale_coefficient::<T>(self.n, self.k, self.m, i, l);
                if !c.is_zero() {
                    total = total + c * self.x[l - 1][i - 1].clone();
                }
            }
        }
        Ok(total)
    }

    /// `max_i |Y_l(B_i)|` for each `l`.
    pub fn y_sup(&self) -> Vec<f64> {
        self.y
            .iter()
            .map(|row| row.iter().map(|v| v.abs().to_f64()).fold(0.0, f64::max))
            .collect()
    }

    /// One CSV row per `(i, l)`:
    /// `i,l,A,condmean,X,Y,kappa,kappa_prime,lambda_partial,qvar_partial`.
    /// The last three columns are empty when the prefix has length `N`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "i,l,A,condmean,X,Y,kappa,kappa_prime,lambda_partial,qvar_partial")?;
        let opt = |v: &[T], i: usize| v.get(i).map(|x| x.to_f64().to_string()).unwrap_or_default();
        for i in 0..self.m {
            for l in 0..self.k {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    i + 1,
                    l + 1,
                    self.a[l][i].to_f64(),
                    self.cond_mean[l][i].to_f64(),
                    self.x[l][i].to_f64(),
                    self.y[l][i].to_f64(),
                    self.kappa[i].to_f64(),
                    opt(&self.kappa_prime, i),
                    opt(&self.lambda_partial, i),
                    opt(&self.qvar_partial, i),
                )?;
            }
        }
        Ok(())
    }
}

fn check_reconstruction_range(n: u32, k: usize, m: usize) -> Result<()> {
    if m == 0 {
        return invalid("reconstruction needs m >= 1");
    }
    if m + k > n as usize && m != n as usize {
        return invalid(format!(
            "the representation needs m <= N - k = {} (or m = N), got m = {m}",
            n as i64 - k as i64
        ));
    }
    Ok(())
}

/// Right-hand side of the martingale representation along `prefix`; equals
/// `D^H(B_m)` for the set of prefix vertices when `m <= N - k` or `m = N`.
pub fn martingale_reconstruction<T: Scalar>(h: &WeightedHypergraph, prefix: &OrderedPrefix) -> Result<T> {
    check_reconstruction_range(h.n(), h.k(), prefix.len())?;
    decompose::<T>(h, prefix, CondMeanMode::Incremental)?.reconstruction()
}

/// Increments `A_l(B_i)` alone, from the link identity
/// `A_l(B_{i-1} ∪ {x}) = N^{H(x)_{l-1}}(B_{i-1})`.
pub fn increments<T: Scalar>(h: &WeightedHypergraph, prefix: &OrderedPrefix) -> Result<Vec<Vec<T>>> {
    Ok(decompose::<T>(h, prefix, CondMeanMode::Incremental)?.a)
}

pub fn conditional_means<T: Scalar>(
    h: &WeightedHypergraph,
    prefix: &OrderedPrefix,
    mode: CondMeanMode,
) -> Result<Vec<Vec<T>>> {
    Ok(decompose::<T>(h, prefix, mode)?.cond_mean)
}

/// `Y_l` along the prefix together with `max_i |Y_l(B_i)|` per `l`.
#[derive(Clone, Debug)]
pub struct YResiduals<T> {
    pub y: Vec<Vec<T>>,
    pub sup: Vec<f64>,
}

pub fn y_residuals<T: Scalar>(h: &WeightedHypergraph, prefix: &OrderedPrefix) -> Result<YResiduals<T>> {
    let d = decompose::<T>(h, prefix, CondMeanMode::Incremental)?;
    let sup = d.y_sup();
    Ok(YResiduals { y: d.y, sup })
}

/// Degree-only process: conditional means of `d(b_i)` from running sums,
/// with no edge scanning. Used for `Λ` and `V` on large instances.
#[derive(Clone, Debug)]
pub struct DegreeProcess {
    degrees: Vec<f64>,
    total: f64,
    total_sq: f64,
    k: usize,
}

/// `Λ` and `V` partial sums along one prefix.
#[derive(Clone, Debug, Default)]
pub struct LambdaTrace {
    pub lambda_partial: Vec<f64>,
    pub qvar_partial: Vec<f64>,
}

impl DegreeProcess {
    pub fn new(h: &WeightedHypergraph) -> Self {
        Self::from_degrees(h.degrees(), h.k())
    }

    pub fn from_degrees(degrees: Vec<f64>, k: usize) -> Self {
        let total = degrees.iter().sum();
        let total_sq = degrees.iter().map(|d| d * d).sum();
        Self {
            degrees,
            total,
            total_sq,
            k,
        }
    }

    pub fn n(&self) -> u32 {
        self.degrees.len() as u32
    }

    /// Runs the process. Rejects `m = N`, where `1 / (1 - s)` blows up.
    pub fn trace(&self, prefix: &OrderedPrefix) -> Result<LambdaTrace> {
        let n = self.n();
        if prefix.n() != n {
            return invalid("prefix and hypergraph disagree on N");
        }
        let m = prefix.len();
        if m >= n as usize {
            return invalid("the degree process is defined only for m < N");
        }
        if m > n as usize / 2 {
            warn!("prefix density m/N = {m}/{n} exceeds 1/2");
        }
        let mut out = LambdaTrace {
            lambda_partial: Vec::with_capacity(m),
            qvar_partial: Vec::with_capacity(m),
        };
        let (mut s1, mut s2) = (self.total, self.total_sq);
        let (mut lambda, mut qvar) = (0.0, 0.0);
        for (idx, &b) in prefix.order().iter().enumerate() {
            let i = idx + 1;
            let remaining = (n as usize - i + 1) as f64;
            let mean = s1 / remaining;
            let var = (s2 / remaining - mean * mean).max(0.0);
            let d = self.degrees[(b - 1) as usize];
            let c: f64 = lambda_coefficient(n, self.k, m, i);
            lambda += c * (d - mean);
            qvar += c * c * var;
            s1 -= d;
            s2 -= d * d;
            out.lambda_partial.push(lambda);
            out.qvar_partial.push(qvar);
        }
        Ok(out)
    }

    /// `Λ` after the whole prefix, without storing partial sums.
    pub fn lambda_final(&self, order: &[Vertex], m: usize) -> f64 {
        let n = self.n() as usize;
        let mut s1 = self.total;
        let mut lambda = 0.0;
        for (idx, &b) in order[..m].iter().enumerate() {
            let i = idx + 1;
            let d = self.degrees[(b - 1) as usize];
            let c: f64 = lambda_coefficient(n as u32, self.k, m, i);
            lambda += c * (d - s1 / (n - i + 1) as f64);
            s1 -= d;
        }
        lambda
    }
}

/// `Λ` partial sums along `prefix`.
pub fn lambda_process(h: &WeightedHypergraph, prefix: &OrderedPrefix) -> Result<Vec<f64>> {
    check_prefix(h, prefix)?;
    Ok(DegreeProcess::new(h).trace(prefix)?.lambda_partial)
}

/// Quadratic variation `V(j) = Σ_{i ≤ j} κ'(i,m)² E[X_1(B_i)² | B_{i-1}]`.
pub fn quadratic_variation(h: &WeightedHypergraph, prefix: &OrderedPrefix) -> Result<Vec<f64>> {
    check_prefix(h, prefix)?;
    Ok(DegreeProcess::new(h).trace(prefix)?.qvar_partial)
}

/// Same as [`quadratic_variation`] but recomputes each conditional variance
/// from the full residual degree list, with no running sums.
pub fn quadratic_variation_from_scratch(h: &WeightedHypergraph, prefix: &OrderedPrefix) -> Result<Vec<f64>> {
    check_prefix(h, prefix)?;
    let n = h.n();
    let m = prefix.len();
    if m >= n as usize {
        return invalid("the degree process is defined only for m < N");
    }
    let degrees = h.degrees();
    let mut in_b = vec![false; n as usize];
    let mut out = Vec::with_capacity(m);
    let mut v = 0.0;
    for (idx, &b) in prefix.order().iter().enumerate() {
        let rest: Vec<f64> = (0..n as usize)
            .filter(|&x| !in_b[x])
            .map(|x| degrees[x])
            .collect();
        let mean = rest.iter().sum::<f64>() / rest.len() as f64;
        let var = rest.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / rest.len() as f64;
        let c: f64 = lambda_coefficient(n, h.k(), m, idx + 1);
        v += c * c * var;
        out.push(v);
        in_b[(b - 1) as usize] = true;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_ap;
    use num_rational::BigRational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ap5() -> WeightedHypergraph {
        gen_ap(5, 3).unwrap()
    }

    #[test]
    fn prefix_validation() {
        assert!(OrderedPrefix::new(5, vec![1, 1]).is_err());
        assert!(OrderedPrefix::new(5, vec![6]).is_err());
        assert!(OrderedPrefix::new(2, vec![1, 2, 3]).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_prefix(5, 0, &mut rng).unwrap().is_empty());
        let full = sample_prefix(7, 7, &mut rng).unwrap();
        let mut sorted = full.order().to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, (1..=7).collect::<Vec<_>>());
        assert!(sample_prefix(3, 4, &mut rng).is_err());
    }

    #[test]
    fn first_increment_is_degree() {
        let h = ap5();
        let prefix = OrderedPrefix::new(5, vec![1, 3, 5]).unwrap();
        let d = decompose::<f64>(&h, &prefix, CondMeanMode::Incremental).unwrap();
        assert_eq!(d.a[0], vec![2.0, 4.0, 2.0]);
        // Edge (1,3,5) completes at step 3.
        assert_eq!(d.a[2], vec![0.0, 0.0, 1.0]);
        // i = 1, l = 1: average degree.
        assert!((d.cond_mean[0][0] - 2.4).abs() < 1e-15);
        // l = 1 residual vanishes.
        assert!(d.y[0].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn full_prefix_conditional_mean_is_last_vertex() {
        let h = ap5();
        let prefix = OrderedPrefix::new(5, vec![2, 4, 1, 5, 3]).unwrap();
        let d = decompose::<f64>(&h, &prefix, CondMeanMode::Incremental).unwrap();
        for l in 0..3 {
            assert_eq!(d.cond_mean[l][4], d.a[l][4]);
            assert_eq!(d.x[l][4], 0.0);
        }
        assert!(d.lambda_partial.is_empty());
        assert_eq!(d.reconstruction().unwrap(), 0.0);
        let near_full = OrderedPrefix::new(5, vec![2, 4, 1]).unwrap();
        assert!(martingale_reconstruction::<f64>(&h, &near_full).is_err());
        let empty = OrderedPrefix::new(5, vec![]).unwrap();
        assert!(martingale_reconstruction::<f64>(&h, &empty).is_err());
    }

    #[test]
    fn single_edge_reconstruction() {
        let h = WeightedHypergraph::from_edges(7, 3, [([2, 4, 6], 2.5)]).unwrap();
        let prefix = OrderedPrefix::new(7, vec![4, 6, 2]).unwrap();
        let rec: BigRational = martingale_reconstruction(&h, &prefix).unwrap();
        let expected = BigRational::from_weight(2.5)
            * (BigRational::from_int(1) - falling_ratio::<BigRational>(3, 7, 3));
        assert_eq!(rec, expected);
    }

    #[test]
    fn modes_agree() {
        let h = crate::generators::gen_random(14, 3, 60, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let prefix = sample_prefix(14, 9, &mut rng).unwrap();
        let a = conditional_means::<BigRational>(&h, &prefix, CondMeanMode::Incremental).unwrap();
        let b = conditional_means::<BigRational>(&h, &prefix, CondMeanMode::Naive).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn kappa_argument_checks() {
        assert!(kappa(3, 2, 10, 3).is_err());
        assert!(kappa(0, 2, 10, 3).is_err());
        assert!(kappa_prime(10, 10, 10, 3).is_err());
        // k = 1: κ = (N-m)/(N-i) = κ'.
        let k1 = kappa(3, 5, 20, 1).unwrap();
        assert!((k1 - 15.0 / 17.0).abs() < 1e-15);
        assert!((kappa_prime(3, 5, 20, 1).unwrap() - 15.0 / 17.0).abs() < 1e-15);
    }

    #[test]
    fn float_kappa_matches_exact() {
        for (i, m, n, k) in [(1, 1, 10, 3), (3, 5, 10, 3), (7, 9, 20, 4), (2, 50, 100, 5)] {
            let exact: BigRational = kappa_exact(i, m, n, k).unwrap();
            let float = kappa(i, m, n, k).unwrap();
            assert!((exact.to_f64() - float).abs() < 1e-14, "{i} {m} {n} {k}");
        }
    }

    #[test]
    fn regular_hypergraph_has_flat_lambda() {
        // Cyclic triples: every vertex has degree 3.
        let n = 9u32;
        let edges: Vec<[u32; 3]> = (0..n).map(|a| [a + 1, (a + 1) % n + 1, (a + 2) % n + 1]).collect();
        let h = WeightedHypergraph::from_unit_edges(n, 3, edges).unwrap();
        let prefix = OrderedPrefix::new(n, vec![3, 7, 1, 8]).unwrap();
        assert!(lambda_process(&h, &prefix).unwrap().iter().all(|&v| v == 0.0));
        assert!(quadratic_variation(&h, &prefix).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn degree_process_matches_decomposition() {
        let h = gen_ap(30, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let prefix = sample_prefix(30, 12, &mut rng).unwrap();
        let d = decompose::<f64>(&h, &prefix, CondMeanMode::Incremental).unwrap();
        let trace = DegreeProcess::new(&h).trace(&prefix).unwrap();
        for (a, b) in d.lambda_partial.iter().zip(&trace.lambda_partial) {
            assert!((a - b).abs() < 1e-9);
        }
        for (a, b) in d.qvar_partial.iter().zip(&trace.qvar_partial) {
            assert!((a - b).abs() < 1e-9 * b.abs().max(1.0));
        }
        let last = DegreeProcess::new(&h).lambda_final(prefix.order(), 12);
        assert!((last - trace.lambda_partial[11]).abs() < 1e-9);
        let full = OrderedPrefix::new(30, (1..=30).collect()).unwrap();
        assert!(lambda_process(&h, &full).is_err());
    }

    #[test]
    fn qvar_first_term_is_degree_variance() {
        let h = gen_ap(20, 3).unwrap();
        let prefix = OrderedPrefix::new(20, vec![5]).unwrap();
        let v = quadratic_variation(&h, &prefix).unwrap();
        let s = h.degree_stats();
        let c: f64 = lambda_coefficient(20, 3, 1, 1);
        assert!((v[0] - c * c * s.degree_variance).abs() < 1e-12);
        let edgeless = WeightedHypergraph::empty(6, 2).unwrap();
        let prefix = OrderedPrefix::new(6, vec![1, 2]).unwrap();
        assert_eq!(quadratic_variation(&edgeless, &prefix).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn csv_rows() {
        let h = ap5();
        let prefix = OrderedPrefix::new(5, vec![1, 3]).unwrap();
        let d = decompose::<f64>(&h, &prefix, CondMeanMode::Incremental).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 2 * 3);
        assert!(text.starts_with("i,l,A,condmean,X,Y,kappa,kappa_prime,lambda_partial,qvar_partial\n1,1,2,"));
    }
}
