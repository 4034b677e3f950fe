//! Sampling of `D^H(B_m)` and `D^H(B_p)`: tail frequencies with interval
//! estimates, moment diagnostics and comparison with predicted rates.
//!
//! Samples are cut into fixed batches. Sample `i` draws from its own random
//! stream and batches are merged in index order, so every output depends
//! only on the seed and the sample count.

mod counter;
mod rng;
mod stats;

use std::io::Write;
use std::sync::atomic::{AtomicU64, Ordering};

use log::info;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use counter::{count_fast, Bitset, Counter};
pub use rng::StreamFactory;
pub use stats::{ks_distance_normal, wilson_interval, MomentSummary, Moments, Z95};

use crate::error::{invalid, Error, Result};
use crate::hypergraph::{DegreeStats, SubsetModel, Vertex, WeightedHypergraph};
use crate::oracle::Side;
use crate::rates::{rate_m, rate_p, WindowOptions};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;
pub const DEFAULT_BATCH: u64 = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationConfig {
    pub seed: u64,
    pub samples: u64,
    /// Worker threads; `0` uses every available core.
    pub workers: usize,
    pub model: SubsetModel,
    /// Ascending deviation thresholds.
    pub thresholds: Vec<f64>,
    pub batch_size: u64,
}

impl SimulationConfig {
    pub fn new(model: SubsetModel, samples: u64) -> Self {
        Self {
            seed: DEFAULT_SEED,
            samples,
            workers: 0,
            model,
            thresholds: Vec::new(),
            batch_size: DEFAULT_BATCH,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_thresholds(mut self, thresholds: Vec<f64>) -> Self {
        self.thresholds = thresholds;
        self
    }

    pub fn validate(&self, n: u32) -> Result<()> {
        if self.samples == 0 {
            return invalid("samples must be at least 1");
        }
        if self.batch_size == 0 {
            return invalid("batch size must be at least 1");
        }
        if self.thresholds.iter().any(|t| t.is_nan()) {
            return invalid("thresholds must not be NaN");
        }
        if self.thresholds.windows(2).any(|w| w[0] > w[1]) {
            return invalid("thresholds must be sorted ascending");
        }
        self.model.validate(n)
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))
    }
}

/// Draws subsets and evaluates deviations. One per worker; holds only
/// reusable buffers.
struct Sampler<'a> {
    h: &'a WeightedHypergraph,
    counter: &'a Counter,
    model: SubsetModel,
    mean: f64,
    perm: Vec<Vertex>,
    swaps: Vec<u32>,
    members: Vec<Vertex>,
    bits: Bitset,
    scratch: Vec<u32>,
}

impl<'a> Sampler<'a> {
    fn new(h: &'a WeightedHypergraph, counter: &'a Counter, model: SubsetModel, mean: f64) -> Self {
        Self {
            h,
            counter,
            model,
            mean,
            perm: (1..=h.n()).collect(),
            swaps: Vec::new(),
            members: Vec::new(),
            bits: Bitset::new(h.n()),
            scratch: Vec::new(),
        }
    }

    fn draw<R: Rng>(&mut self, rng: &mut R) {
        let n = self.h.n() as usize;
        self.members.clear();
        self.bits.clear();
        match self.model {
            SubsetModel::UniformM { m } => {
                let m = m as usize;
                self.swaps.clear();
                for i in 0..m {
                    let j = rng.random_range(i..n);
                    self.perm.swap(i, j);
                    self.swaps.push(j as u32);
                }
                self.members.extend_from_slice(&self.perm[..m]);
                // Restore the identity so the next draw does not depend on
                // this one.
                for (i, &j) in self.swaps.iter().enumerate().rev() {
                    self.perm.swap(i, j as usize);
                }
            }
            SubsetModel::BinomialP { p } => {
                for v in 1..=n as Vertex {
                    if rng.random_bool(p) {
                        self.members.push(v);
                    }
                }
            }
        }
        for &v in &self.members {
            self.bits.insert(v);
        }
    }

    fn deviation<R: Rng>(&mut self, rng: &mut R) -> f64 {
        self.draw(rng);
        self.counter.count(self.h, &self.members, &self.bits, &mut self.scratch) - self.mean
    }
}

#[derive(Clone, Debug, Default)]
struct BatchResult {
    upper: Vec<u64>,
    lower: Vec<u64>,
    moments: Moments,
    values: Vec<f64>,
}

/// Runs every batch and returns the per-batch results in batch order.
fn run(h: &WeightedHypergraph, config: &SimulationConfig, keep_values: bool) -> Result<Vec<BatchResult>> {
    config.validate(h.n())?;
    let counter = Counter::for_hypergraph(h);
    let mean = config.model.mean_count(h)?;
    let streams = StreamFactory::new(config.seed);
    let batches: Vec<(u64, u64)> = (0..config.samples.div_ceil(config.batch_size))
        .map(|b| {
            let start = b * config.batch_size;
            (start, (start + config.batch_size).min(config.samples))
        })
        .collect();
    let done = AtomicU64::new(0);
    let report_every = (batches.len() as u64 / 10).max(1);
    let thresholds = &config.thresholds;
    let results = config.pool()?.install(|| {
        batches
            .par_iter()
            .map_init(
                || Sampler::new(h, &counter, config.model, mean),
                |sampler, &(start, end)| {
                    let mut out = BatchResult {
                        upper: vec![0; thresholds.len()],
                        lower: vec![0; thresholds.len()],
                        ..Default::default()
                    };
                    for i in start..end {
                        let mut rng = streams.stream(i);
                        let d = sampler.deviation(&mut rng);
                        out.moments.push(d);
                        for (t, &a) in thresholds.iter().enumerate() {
                            out.upper[t] += (d >= a) as u64;
                            out.lower[t] += (d <= -a) as u64;
                        }
                        if keep_values {
                            out.values.push(d);
                        }
                    }
                    let finished = done.fetch_add(1, Ordering::Relaxed) + 1;
                    if finished % report_every == 0 {
                        info!("{finished}/{} batches", batches.len());
                    }
                    out
                },
            )
            .collect::<Vec<_>>()
    });
    Ok(results)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailEstimate {
    pub threshold: f64,
    pub side: Side,
    pub hits: u64,
    pub samples: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `-log p_hat`, or `-log ci_high` when there are no hits.
    pub neg_log_p: f64,
    pub neg_log_p_is_lower_bound: bool,
    pub predicted_exponent: Option<f64>,
    /// `neg_log_p / predicted_exponent`.
    pub ratio: Option<f64>,
    /// Fewer than ten hits expected under the prediction (or observed,
    /// when there is none).
    pub underpowered: bool,
}

impl TailEstimate {
    pub fn new(threshold: f64, side: Side, hits: u64, samples: u64, predicted_exponent: Option<f64>) -> Self {
        let p_hat = hits as f64 / samples as f64;
        let (ci_low, ci_high) = wilson_interval(hits, samples);
        let (neg_log_p, lower_bound) = if hits == 0 {
            (-ci_high.ln(), true)
        } else {
            (-p_hat.ln(), false)
        };
        let expected_hits = match predicted_exponent {
            Some(e) => samples as f64 * (-e).exp(),
            None => hits as f64,
        };
        Self {
            threshold,
            side,
            hits,
            samples,
            p_hat,
            ci_low,
            ci_high,
            neg_log_p,
            neg_log_p_is_lower_bound: lower_bound,
            predicted_exponent,
            ratio: predicted_exponent.filter(|&e| e > 0.0).map(|e| neg_log_p / e),
            underpowered: expected_hits < 10.0,
        }
    }
}

/// Predicted exponent for a deviation of size `a` in either direction, when
/// the rate formulas apply.
pub fn predicted_exponent(stats: &DegreeStats, model: SubsetModel, a: f64) -> Option<f64> {
    if !a.is_finite() || a < 0.0 {
        return None;
    }
    let window = WindowOptions::default();
    match model {
        SubsetModel::UniformM { m } => rate_m(stats, m as f64 / stats.n as f64, a, &window).ok(),
        SubsetModel::BinomialP { p } => {
            let scale = p.powi(stats.k as i32) * stats.total_weight;
            (scale > 0.0).then(|| rate_p(stats, p, a / scale, &window).ok()).flatten()
        }
    }
    .map(|r| r.exponent)
}

/// Predicted standard deviation of `D` under the model.
pub fn predicted_normalizer(stats: &DegreeStats, model: SubsetModel) -> Option<f64> {
    let window = WindowOptions::default();
    match model {
        SubsetModel::UniformM { m } => rate_m(stats, m as f64 / stats.n as f64, 0.0, &window).ok(),
        SubsetModel::BinomialP { p } => rate_p(stats, p, 0.0, &window).ok(),
    }
    .map(|r| r.normalizer)
}

/// Upper (`D >= a`) and lower (`D <= -a`) tail frequencies for every
/// threshold, upper first.
pub fn estimate_tail(h: &WeightedHypergraph, config: &SimulationConfig) -> Result<Vec<TailEstimate>> {
    let batches = run(h, config, false)?;
    let t = config.thresholds.len();
    let (mut upper, mut lower) = (vec![0u64; t], vec![0u64; t]);
    for b in &batches {
        for i in 0..t {
            upper[i] += b.upper[i];
            lower[i] += b.lower[i];
        }
    }
    let stats = h.degree_stats();
    let mut out = Vec::with_capacity(2 * t);
    for (side, hits) in [(Side::Upper, &upper), (Side::Lower, &lower)] {
        for (i, &a) in config.thresholds.iter().enumerate() {
            let pred = predicted_exponent(&stats, config.model, a);
            out.push(TailEstimate::new(a, side, hits[i], config.samples, pred));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentsReport {
    #[serde(flatten)]
    pub summary: MomentSummary,
    pub normalizer: Option<f64>,
    /// Sample variance over the predicted variance.
    pub variance_ratio: Option<f64>,
    /// KS distance after standardising by the sample mean and deviation.
    pub ks_distance: Option<f64>,
    /// KS distance after dividing by the predicted normalizer.
    pub ks_distance_predicted: Option<f64>,
}

/// Mean, variance, skewness and excess kurtosis of `D`; with `ks` set, also
/// the Kolmogorov–Smirnov distance of the standardised sample to N(0, 1).
pub fn empirical_moments(h: &WeightedHypergraph, config: &SimulationConfig, ks: bool) -> Result<MomentsReport> {
    let batches = run(h, config, ks)?;
    let mut moments = Moments::default();
    let mut values = Vec::new();
    for b in batches {
        moments.merge(&b.moments);
        values.extend(b.values);
    }
    let summary = MomentSummary::from(&moments);
    let normalizer = predicted_normalizer(&h.degree_stats(), config.model);
    let (ks_distance, ks_distance_predicted) = if ks {
        (
            Some(ks_distance_normal(&values, summary.mean, summary.variance.sqrt())),
            normalizer.map(|s| ks_distance_normal(&values, 0.0, s)),
        )
    } else {
        (None, None)
    };
    Ok(MomentsReport {
        variance_ratio: normalizer.map(|s| summary.variance / (s * s)),
        summary,
        normalizer,
        ks_distance,
        ks_distance_predicted,
    })
}

/// Sampled deviations themselves, in sample order.
pub fn sample_deviations(h: &WeightedHypergraph, config: &SimulationConfig) -> Result<Vec<f64>> {
    Ok(run(h, config, true)?.into_iter().flat_map(|b| b.values).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    /// Threshold over the predicted normalizer.
    pub normalizers: Option<f64>,
    #[serde(flatten)]
    pub estimate: TailEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub normalizer: Option<f64>,
    pub rows: Vec<SweepRow>,
}

/// Empirical against predicted exponents across thresholds.
pub fn rate_ratio_sweep(h: &WeightedHypergraph, config: &SimulationConfig) -> Result<SweepTable> {
    let normalizer = predicted_normalizer(&h.degree_stats(), config.model);
    let rows = estimate_tail(h, config)?
        .into_iter()
        .map(|estimate| SweepRow {
            normalizers: normalizer.map(|s| estimate.threshold / s),
            estimate,
        })
        .collect();
    Ok(SweepTable { normalizer, rows })
}

impl SweepTable {
    pub const CSV_HEADER: &'static str = "side,threshold,normalizers,hits,samples,p_hat,ci_low,ci_high,neg_log_p,neg_log_p_is_lower_bound,predicted_exponent,ratio,underpowered";

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for row in &self.rows {
            let e = &row.estimate;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                match e.side {
                    Side::Upper => "upper",
                    Side::Lower => "lower",
                },
                e.threshold,
                opt(row.normalizers),
                e.hits,
                e.samples,
                e.p_hat,
                e.ci_low,
                e.ci_high,
                e.neg_log_p,
                e.neg_log_p_is_lower_bound,
                opt(e.predicted_exponent),
                opt(e.ratio),
                e.underpowered,
            )?;
        }
        Ok(())
    }
}
