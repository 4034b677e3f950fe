//! Closed-form predictions: rate functions for both subset models, the
//! progression constants `θ_k` and `γ_k`, the three-regime picture for
//! 3-term progressions, admissibility windows and concentration bounds.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use statrs::function::factorial::ln_binomial;

use crate::error::{invalid, Error, Result};
use crate::hypergraph::DegreeStats;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    UniformM,
    BinomialP,
}

/// Where a deviation sits relative to the admissible range of a rate
/// theorem. Advisory only.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowCheck {
    pub r: usize,
    pub lower_boundary: f64,
    pub upper_boundary: f64,
    pub value: f64,
    /// `value / lower_boundary`.
    pub ratio_low: f64,
    /// `upper_boundary / value`.
    pub ratio_high: f64,
    pub slack_low: f64,
    pub slack_high: f64,
    /// `value >= slack_low * lower && value * slack_high <= upper`.
    pub inside: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatePrediction {
    pub model: ModelKind,
    /// Predicted `-log P(D >= threshold)`.
    pub exponent: f64,
    /// Predicted standard deviation of `D`.
    pub normalizer: f64,
    /// Deviation `a` for the uniform model, `δ p^k e(H)` for the binomial one.
    pub threshold: f64,
    pub window: WindowCheck,
    pub notes: Vec<String>,
}

/// Order `r` and slack used for window checks. With `r = None` the order is
/// the smallest `r >= 2` whose `Δ_r` is at most `k²`, falling back to `k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowOptions {
    pub r: Option<usize>,
    pub slack_low: f64,
    pub slack_high: f64,
}

impl Default for WindowOptions {
    fn default() -> Self {
        Self {
            r: None,
            slack_low: 1.0,
            slack_high: 1.0,
        }
    }
}

impl WindowOptions {
    fn resolve(&self, stats: &DegreeStats, notes: &mut Vec<String>) -> Result<usize> {
        if let Some(r) = self.r {
            return Ok(r);
        }
        let bound = (stats.k * stats.k) as f64;
        Ok(match stats.bounded_degree_order(bound) {
            Some(r) => {
                notes.push(format!(
                    "r = {r}: smallest order with max {r}-set degree {} <= {bound}",
                    stats.delta(r).unwrap_or(0.0)
                ));
                r
            }
            None => {
                notes.push(format!("no order r < k has max set degree <= {bound}; using r = k"));
                stats.k
            }
        })
    }
}

fn check_open_unit(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return invalid(format!("{name} must lie in (0, 1), got {x}"));
    }
    Ok(())
}

fn check_nonneg(name: &str, x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return invalid(format!("{name} must be finite and nonnegative, got {x}"));
    }
    Ok(())
}

/// Rate for the uniform model `B_m`, `t = m / N`, deviation `a`:
/// exponent `a² / (2 (1-t) t^{2k-1} σ² N)`.
pub fn rate_m(stats: &DegreeStats, t: f64, a: f64, window: &WindowOptions) -> Result<RatePrediction> {
    check_open_unit("t", t)?;
    check_nonneg("a", a)?;
    let sigma2 = stats.degree_variance;
    if sigma2 <= 1e-12 * stats.mean_degree * stats.mean_degree || sigma2 <= 0.0 {
        return Err(Error::Domain(
            "degree variance is zero: the hypergraph is degree-regular and the degree process vanishes".into(),
        ));
    }
    let (n, k) = (stats.n as f64, stats.k);
    let mut notes = Vec::new();
    if t > 0.5 {
        notes.push(format!("t = {t} exceeds 1/2, outside the range the rate is proved for"));
    }
    let var = (1.0 - t) * t.powi(2 * k as i32 - 1) * sigma2 * n;
    let r = window.resolve(stats, &mut notes)?;
    let w = window_check_m(stats.n, k, r, t, a, window.slack_low, window.slack_high)?;
    Ok(RatePrediction {
        model: ModelKind::UniformM,
        exponent: a * a / (2.0 * var),
        normalizer: var.sqrt(),
        threshold: a,
        window: w,
        notes,
    })
}

/// Rate for the binomial model `B_p` at relative deviation `δ`:
/// exponent `δ² p e(H)² / (2 (1-p) (d̄² + σ²) N)`.
pub fn rate_p(stats: &DegreeStats, p: f64, delta: f64, window: &WindowOptions) -> Result<RatePrediction> {
    check_open_unit("p", p)?;
    check_nonneg("delta", delta)?;
    let spread = stats.mean_degree * stats.mean_degree + stats.degree_variance;
    if spread <= 0.0 {
        return Err(Error::Domain("d̄² + σ² is zero: the hypergraph has no edges".into()));
    }
    let (n, k) = (stats.n as f64, stats.k);
    let e = stats.total_weight;
    let q = 1.0 - p;
    let mut notes = Vec::new();
    let r = window.resolve(stats, &mut notes)?;
    let w = window_check_p(stats.n, k, r, p, delta, window.slack_low, window.slack_high)?;
    Ok(RatePrediction {
        model: ModelKind::BinomialP,
        exponent: delta * delta * p * e * e / (2.0 * q * spread * n),
        normalizer: q.sqrt() * p.powf(k as f64 - 0.5) * spread.sqrt() * n.sqrt(),
        threshold: delta * p.powi(k as i32) * e,
        window: w,
        notes,
    })
}

/// `Σ_{1<=i<j<=k} ((k-1)² - (k-j)² - (i-1)²) / ((j-1)(k-i))`.
fn progression_pair_sum(k: usize) -> BigRational {
    let k = k as i64;
    let mut s = BigRational::zero();
    for i in 1..=k {
        for j in i + 1..=k {
            let num = (k - 1).pow(2) - (k - j).pow(2) - (i - 1).pow(2);
            s += BigRational::new(num.into(), ((j - 1) * (k - i)).into());
        }
    }
    s
}

fn check_k(k: usize) -> Result<()> {
    if k < 3 {
        return invalid(format!("progression constants need k >= 3, got {k}"));
    }
    Ok(())
}

/// `θ_k = (k - 3k²/4 + S) / (3 (k-1)²)`; the degree variance of the
/// k-term progression hypergraph is `(1 + o(1)) θ_k N²`.
pub fn theta_k_exact(k: usize) -> Result<BigRational> {
    check_k(k)?;
    let ki = k as i64;
    let inner = BigRational::from_int(ki) - BigRational::new((3 * ki * ki).into(), 4.into())
        + progression_pair_sum(k);
    Ok(inner / BigRational::from_int(3 * (ki - 1) * (ki - 1)))
}

pub fn theta_k(k: usize) -> Result<f64> {
    Ok(theta_k_exact(k)?.to_f64())
}

/// `γ_k = 4/3 (k + S)`, with `(d̄² + σ²) / e² = (1 + o(1)) γ_k / N²` for
/// k-term progressions.
pub fn gamma_k_exact(k: usize) -> Result<BigRational> {
    check_k(k)?;
    Ok(BigRational::new(4.into(), 3.into()) * (BigRational::from_int(k as i64) + progression_pair_sum(k)))
}

pub fn gamma_k(k: usize) -> Result<f64> {
    Ok(gamma_k_exact(k)?.to_f64())
}

/// Asymptotic uniform-model exponent for k-term progressions,
/// `a² / (2 θ_k (1-t) t^{2k-1} N³)`.
pub fn rate_m_progression(n: u32, k: usize, t: f64, a: f64) -> Result<f64> {
    check_open_unit("t", t)?;
    let n = n as f64;
    Ok(a * a / (2.0 * theta_k(k)? * (1.0 - t) * t.powi(2 * k as i32 - 1) * n.powi(3)))
}

/// Asymptotic binomial-model exponent for k-term progressions,
/// `δ² p N / (2 (1-p) γ_k)`.
pub fn rate_p_progression(n: u32, k: usize, p: f64, delta: f64) -> Result<f64> {
    check_open_unit("p", p)?;
    Ok(delta * delta * p * n as f64 / (2.0 * (1.0 - p) * gamma_k(k)?))
}

/// Asymptotic uniform-model exponent for additive quadruples,
/// `360 a² / ((1-t) t⁷ N⁵)`.
pub fn rate_m_sidon(n: u32, t: f64, a: f64) -> Result<f64> {
    check_open_unit("t", t)?;
    Ok(360.0 * a * a / ((1.0 - t) * t.powi(7) * (n as f64).powi(5)))
}

/// Asymptotic binomial-model exponent for additive quadruples,
/// `5 δ² p N / (162 (1-p))`.
pub fn rate_p_sidon(n: u32, p: f64, delta: f64) -> Result<f64> {
    check_open_unit("p", p)?;
    Ok(5.0 * delta * delta * p * n as f64 / (162.0 * (1.0 - p)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    Normal,
    Poisson,
    Localized,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegimeClassification {
    pub normal_term: f64,
    pub poisson_term: f64,
    pub localized_term: f64,
    pub label: Regime,
    pub value: f64,
    /// The Poisson and localized constants are believed, not proved.
    pub conjectural: bool,
}

/// Candidate upper-tail exponents for 3-term progression counts in `B_p`:
/// `3δ²pN / (56(1-p))`, `δ²p³N² / 8` and `δ^{1/2} p^{3/2} N log(1/p)`.
/// Exact ties go to the earlier of Normal, Poisson, Localized.
pub fn w3_regime(n: u32, p: f64, delta: f64) -> Result<RegimeClassification> {
    check_open_unit("p", p)?;
    if !(delta > 0.0) {
        return invalid(format!("delta must be positive, got {delta}"));
    }
    let n = n as f64;
    let terms = [
        (Regime::Normal, 3.0 * delta * delta * p * n / (56.0 * (1.0 - p))),
        (Regime::Poisson, delta * delta * p.powi(3) * n * n / 8.0),
        (Regime::Localized, delta.sqrt() * p.powf(1.5) * n * (1.0 / p).ln()),
    ];
    let (label, value) = classify(&terms);
    Ok(RegimeClassification {
        normal_term: terms[0].1,
        poisson_term: terms[1].1,
        localized_term: terms[2].1,
        label,
        value,
        conjectural: true,
    })
}

fn classify(terms: &[(Regime, f64); 3]) -> (Regime, f64) {
    let mut best = terms[0];
    for &t in &terms[1..] {
        if t.1 < best.1 {
            best = t;
        }
    }
    best
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return invalid(format!("{name} must be positive and finite, got {x}"));
    }
    Ok(())
}

/// `exp(-α² / (2(β + Rα)))`.
pub fn freedman_bound(alpha: f64, beta: f64, r: f64) -> Result<f64> {
    check_positive("alpha", alpha)?;
    check_positive("beta", beta)?;
    check_positive("R", r)?;
    Ok((-alpha * alpha / (2.0 * (beta + r * alpha))).exp())
}

/// `exp(-a² / (2 Σ c_i²))`.
pub fn hoeffding_azuma_bound(a: f64, sum_c_sq: f64) -> Result<f64> {
    check_nonneg("a", a)?;
    check_positive("sum of squared increments", sum_c_sq)?;
    Ok((-a * a / (2.0 * sum_c_sq)).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ConverseFreedman {
    /// Lower bound `½ exp(-α²(1+4δ)/(2β))` at the smallest admissible `δ`.
    Applicable { delta: f64, factor: f64 },
    /// No `δ <= 1` satisfies both side conditions.
    NotApplicable { delta_required: f64 },
}

/// Lower-bound factor of the converse Freedman inequality. `δ` is the
/// smallest value in `(0, 1]` with `β/α >= 9Rδ⁻²` and
/// `α²/β >= 16δ⁻² log(64δ⁻²)`.
pub fn freedman_converse_factor(alpha: f64, beta: f64, r: f64) -> Result<ConverseFreedman> {
    check_positive("alpha", alpha)?;
    check_positive("beta", beta)?;
    check_positive("R", r)?;
    let from_increments = (9.0 * r * alpha / beta).sqrt();
    let target = alpha * alpha / beta;
    // 16δ⁻² log(64δ⁻²) is decreasing on (0, 1].
    let g = |d: f64| 16.0 / (d * d) * (64.0 / (d * d)).ln();
    let from_variance = if g(1.0) > target {
        f64::INFINITY
    } else {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if g(mid) <= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    let delta = from_increments.max(from_variance);
    Ok(if delta <= 1.0 {
        ConverseFreedman::Applicable {
            delta,
            factor: 0.5 * (-target * (1.0 + 4.0 * delta) / 2.0).exp(),
        }
    } else {
        ConverseFreedman::NotApplicable { delta_required: delta }
    })
}

/// Splitting a binomial-model deviation between the number of chosen
/// vertices and the count given that number.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimalSplit {
    /// `d̄² / (d̄² + σ²)`.
    pub eta_star: f64,
    /// `(η, m_η)` with `m_η = (1 + ηδ/k) pN`, on a grid of η plus `η*`.
    pub m_sequence: Vec<(f64, f64)>,
    pub combined_exponent: f64,
    pub x_at_eta_star: f64,
    pub gaussian_log_pmf: f64,
    pub exact_log_pmf: f64,
}

/// Cost of putting a share `η` of the relative deviation `δ` into the vertex
/// count: `δ²pN/(2qk²) (η² + (1-η)² d̄²/σ²)`.
pub fn split_exponent(stats: &DegreeStats, p: f64, delta: f64, eta: f64) -> f64 {
    let (n, k) = (stats.n as f64, stats.k as f64);
    let base = delta * delta * p * n / (2.0 * (1.0 - p) * k * k);
    let d2 = stats.mean_degree * stats.mean_degree;
    let conditional = if eta == 1.0 {
        0.0
    } else {
        (1.0 - eta).powi(2) * d2 / stats.degree_variance
    };
    base * (eta * eta + conditional)
}

/// `x(m) = (m - pN) / sqrt(p q N)`.
pub fn binomial_z(n: u32, p: f64, m: f64) -> f64 {
    let n = n as f64;
    (m - p * n) / (p * (1.0 - p) * n).sqrt()
}

/// Gaussian estimate `-x²/2 - ½ log(2π p q N)` of `log P(Bin(N,p) = m)`.
pub fn gaussian_log_pmf(n: u32, p: f64, m: f64) -> f64 {
    let x = binomial_z(n, p, m);
    -0.5 * x * x - 0.5 * (2.0 * std::f64::consts::PI * p * (1.0 - p) * n as f64).ln()
}

/// `log P(Bin(N,p) = m)` from log-factorials.
pub fn exact_log_binomial_pmf(n: u32, p: f64, m: u64) -> Result<f64> {
    check_open_unit("p", p)?;
    if m > n as u64 {
        return invalid(format!("m = {m} exceeds N = {n}"));
    }
    Ok(ln_binomial(n as u64, m) + m as f64 * p.ln() + (n as u64 - m) as f64 * (1.0 - p).ln())
}

pub fn optimal_split(stats: &DegreeStats, p: f64, delta: f64) -> Result<OptimalSplit> {
    check_open_unit("p", p)?;
    check_nonneg("delta", delta)?;
    let d2 = stats.mean_degree * stats.mean_degree;
    let spread = d2 + stats.degree_variance;
    if spread <= 0.0 {
        return Err(Error::Domain("d̄² + σ² is zero: the hypergraph has no edges".into()));
    }
    let eta_star = d2 / spread;
    let (n, k) = (stats.n, stats.k as f64);
    let m_of = |eta: f64| (1.0 + eta * delta / k) * p * n as f64;
    let mut m_sequence: Vec<(f64, f64)> = (0..=10).map(|j| j as f64 / 10.0).map(|e| (e, m_of(e))).collect();
    m_sequence.push((eta_star, m_of(eta_star)));
    m_sequence.sort_by(|a, b| a.0.total_cmp(&b.0));
    let m_star = m_of(eta_star);
    let m_round = m_star.round().clamp(0.0, n as f64) as u64;
    Ok(OptimalSplit {
        eta_star,
        m_sequence,
        combined_exponent: split_exponent(stats, p, delta, eta_star),
        x_at_eta_star: binomial_z(n, p, m_star),
        gaussian_log_pmf: gaussian_log_pmf(n, p, m_round as f64),
        exact_log_pmf: exact_log_binomial_pmf(n, p, m_round)?,
    })
}

fn check_window_args(n: u32, k: usize, r: usize) -> Result<()> {
    if !(2..=k).contains(&r) {
        return invalid(format!("r must lie in 2..={k}, got {r}"));
    }
    if n < 2 {
        return invalid("window boundaries need N >= 2");
    }
    Ok(())
}

fn window(r: usize, lower: f64, upper: f64, value: f64, slack_low: f64, slack_high: f64) -> WindowCheck {
    WindowCheck {
        r,
        lower_boundary: lower,
        upper_boundary: upper,
        value,
        ratio_low: value / lower,
        ratio_high: upper / value,
        slack_low,
        slack_high,
        inside: value >= slack_low * lower && value * slack_high <= upper,
    }
}

/// Uniform-model window
/// `t^{k-1/2} N^{r-1/2} (log N)^{1/2} << a << t^{k-1/2+(k-1)/(2(r-1))} N^r`.
pub fn window_check_m(
    n: u32,
    k: usize,
    r: usize,
    t: f64,
    a: f64,
    slack_low: f64,
    slack_high: f64,
) -> Result<WindowCheck> {
    check_window_args(n, k, r)?;
    check_open_unit("t", t)?;
    let (nf, kf, rf) = (n as f64, k as f64, r as f64);
    let lower = t.powf(kf - 0.5) * nf.powf(rf - 0.5) * nf.ln().sqrt();
    let upper = t.powf(kf - 0.5 + (kf - 1.0) / (2.0 * (rf - 1.0))) * nf.powf(rf);
    Ok(window(r, lower, upper, a, slack_low, slack_high))
}

/// Binomial-model window `sqrt(log N / (pN)) << δ << p^{(k-r)/(2(r-1))}`.
pub fn window_check_p(
    n: u32,
    k: usize,
    r: usize,
    p: f64,
    delta: f64,
    slack_low: f64,
    slack_high: f64,
) -> Result<WindowCheck> {
    check_window_args(n, k, r)?;
    check_open_unit("p", p)?;
    let nf = n as f64;
    let lower = (nf.ln() / (p * nf)).sqrt();
    let upper = p.powf((k - r) as f64 / (2.0 * (r as f64 - 1.0)));
    Ok(window(r, lower, upper, delta, slack_low, slack_high))
}

/// `1 / (2 γ_k)`, the constant in the binomial-model progression rate.
pub fn progression_rate_constant(k: usize) -> Result<BigRational> {
    Ok(BigRational::one() / (BigRational::from_int(2) * gamma_k_exact(k)?))
}
