//! Interval estimates and streaming moments.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// 95% Wilson score interval for `hits` successes in `n` trials. With no
/// hits the upper end is the exact one-sided bound `1 - 0.05^{1/n}`.
pub fn wilson_interval(hits: u64, n: u64) -> (f64, f64) {
    assert!(n > 0 && hits <= n);
    if hits == 0 {
        return (0.0, 1.0 - 0.05f64.powf(1.0 / n as f64));
    }
    let nf = n as f64;
    let p = hits as f64 / nf;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Running central moments up to order four, with exact pairwise merging.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        let n1 = self.n as f64;
        self.n += 1;
        let n = self.n as f64;
        let delta = x - self.mean;
        let dn = delta / n;
        let dn2 = dn * dn;
        let t1 = delta * dn * n1;
        self.mean += dn;
        self.m4 += t1 * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * self.m2 - 4.0 * dn * self.m3;
        self.m3 += t1 * dn * (n - 2.0) - 3.0 * dn * self.m2;
        self.m2 += t1;
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        let d2 = delta * delta;
        let m2 = self.m2 + other.m2 + d2 * na * nb / n;
        let m3 = self.m3
            + other.m3
            + delta * d2 * na * nb * (na - nb) / (n * n)
            + 3.0 * delta * (na * other.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + other.m4
            + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * other.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * delta * (na * other.m3 - nb * self.m3) / n;
        self.mean += delta * nb / n;
        self.m2 = m2;
        self.m3 = m3;
        self.m4 = m4;
        self.n += other.n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        self.m2 / (self.n - 1) as f64
    }

    /// Population skewness `m3 / m2^{3/2}`.
    pub fn skewness(&self) -> f64 {
        if self.m2 == 0.0 {
            return 0.0;
        }
        (self.n as f64).sqrt() * self.m3 / self.m2.powf(1.5)
    }

    /// Population excess kurtosis `m4 / m2² - 3`.
    pub fn excess_kurtosis(&self) -> f64 {
        if self.m2 == 0.0 {
            return 0.0;
        }
        self.n as f64 * self.m4 / (self.m2 * self.m2) - 3.0
    }
}

/// Kolmogorov–Smirnov distance between the empirical law of
/// `(x - centre) / scale` and the standard normal.
pub fn ks_distance_normal(values: &[f64], centre: f64, scale: f64) -> f64 {
    if values.is_empty() || !(scale > 0.0) {
        return 1.0;
    }
    let normal = Normal::standard();
    let mut z: Vec<f64> = values.iter().map(|v| (v - centre) / scale).collect();
    z.sort_by(f64::total_cmp);
    let n = z.len() as f64;
    z.iter().enumerate().fold(0.0, |acc, (i, &x)| {
        let f = normal.cdf(x);
        acc.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentSummary {
    pub samples: u64,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

impl From<&Moments> for MomentSummary {
    fn from(m: &Moments) -> Self {
        Self {
            samples: m.count(),
            mean: m.mean(),
            variance: m.variance(),
            skewness: m.skewness(),
            excess_kurtosis: m.excess_kurtosis(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(xs: &[f64]) -> (f64, f64, f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let c = |p: i32| xs.iter().map(|x| (x - mean).powi(p)).sum::<f64>() / n;
        let (m2, m3, m4) = (c(2), c(3), c(4));
        (mean, m2 * n / (n - 1.0), m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    }

    #[test]
    fn streaming_and_merged_moments_agree_with_direct() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 7919) % 1013) as f64 + (i as f64).sqrt()).collect();
        let (mean, var, skew, kurt) = direct(&xs);
        let mut all = Moments::default();
        xs.iter().for_each(|&x| all.push(x));
        let mut merged = Moments::default();
        for chunk in xs.chunks(137) {
            let mut part = Moments::default();
            chunk.iter().for_each(|&x| part.push(x));
            merged.merge(&part);
        }
        for m in [all, merged] {
            assert_eq!(m.count(), 1000);
            assert!((m.mean() - mean).abs() < 1e-9);
            assert!((m.variance() / var - 1.0).abs() < 1e-12);
            assert!((m.skewness() - skew).abs() < 1e-10);
            assert!((m.excess_kurtosis() - kurt).abs() < 1e-10);
        }
    }

    #[test]
    fn wilson_properties() {
        let (lo, hi) = wilson_interval(50, 100);
        assert!(lo < 0.5 && hi > 0.5);
        assert!((0.5 - lo - (hi - 0.5)).abs() < 1e-12);
        let (lo, hi) = wilson_interval(0, 1000);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.002_991).abs() < 1e-5);
        let (lo, hi) = wilson_interval(1000, 1000);
        assert!(lo > 0.99 && hi == 1.0);
    }

    #[test]
    fn ks_of_normal_quantiles_is_small() {
        let normal = Normal::standard();
        let xs: Vec<f64> = (0..10_000).map(|i| normal.inverse_cdf((i as f64 + 0.5) / 10_000.0)).collect();
        assert!(ks_distance_normal(&xs, 0.0, 1.0) < 1e-4);
        assert!(ks_distance_normal(&xs, 1.0, 1.0) > 0.3);
    }
}
