//! Arithmetic shared by the float and exact-rational code paths.
//!
//! Identities such as the martingale representation are exact, so every
//! routine that evaluates them is generic over [`Scalar`]: `f64` for speed,
//! [`BigRational`] when floating error must be told apart from logic error.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

pub trait Scalar: Num + Signed + Clone + Debug + PartialOrd + Send + Sync + 'static {
    /// Converts an edge weight. Exact for rationals: every finite `f64` is a
    /// dyadic rational.
    fn from_weight(w: f64) -> Self;
    fn from_int(n: i64) -> Self;
    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    #[inline]
    fn from_weight(w: f64) -> Self {
        w
    }
    #[inline]
    fn from_int(n: i64) -> Self {
        n as f64
    }
    #[inline]
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    fn from_weight(w: f64) -> Self {
        BigRational::from_float(w).expect("edge weights are finite")
    }
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Falling factorial `(a)_j = a (a-1) ... (a-j+1)`; vanishes when `0 <= a < j`.
pub fn falling<T: Scalar>(a: i64, j: usize) -> T {
    let mut acc = T::one();
    for step in 0..j as i64 {
        let f = a - step;
        if f == 0 {
            return T::zero();
        }
        acc = acc * T::from_int(f);
    }
    acc
}

/// Ratio `(a)_j / (b)_j` evaluated factor by factor, which keeps float
/// results in range for large arguments.
pub fn falling_ratio<T: Scalar>(a: i64, b: i64, j: usize) -> T {
    let mut acc = T::one();
    for step in 0..j as i64 {
        let num = a - step;
        if num == 0 {
            return T::zero();
        }
        acc = acc * T::from_int(num) / T::from_int(b - step);
    }
    acc
}

/// Binomial coefficient as `u128`; `None` on overflow.
pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after the multiplication.
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Small binomial coefficient, used for `C(k-1, l-1)` style factors.
pub fn binomial<T: Scalar>(n: usize, k: usize) -> T {
    match binomial_u128(n as u64, k as u64).and_then(|b| i64::try_from(b).ok()) {
        Some(b) => T::from_int(b),
        None => {
            let mut acc = T::one();
            for i in 0..k.min(n - k) {
                acc = acc * T::from_int((n - i) as i64) / T::from_int(i as i64 + 1);
            }
            acc
        }
    }
}

/// Exact rational from a `u128` count.
pub fn rational_from_u128(n: u128) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `"a/b"`, a decimal literal, or an integer into an exact rational.
/// Decimal literals are read as the decimal fraction they spell
/// (`0.1` is `1/10`), not as the nearest `f64`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str_radix(num.trim(), 10).ok()?;
        let d = BigInt::from_str_radix(den.trim(), 10).ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if int_digits.is_empty() { "0" } else { int_digits }, frac);
        let mut n = BigInt::from_str_radix(&digits, 10).ok()?;
        if negative {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Some(BigRational::new(n, d));
    }
    BigInt::from_str_radix(s, 10).ok().map(BigRational::from_integer)
}

/// Formats a rational as `"p/q"` (or `"p"` when integral).
pub fn rational_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn falling_factorials() {
        assert_eq!(falling::<f64>(5, 3), 60.0);
        assert_eq!(falling::<f64>(2, 3), 0.0);
        assert_eq!(falling::<f64>(7, 0), 1.0);
        assert!((falling_ratio::<f64>(3, 5, 3) - 0.1).abs() < 1e-16);
        let q: BigRational = falling_ratio(6, 12, 3);
        assert_eq!(q, BigRational::new(1.into(), 11.into()));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial_u128(12, 6), Some(924));
        assert_eq!(binomial_u128(3, 5), Some(0));
        assert_eq!(binomial::<f64>(4, 2), 6.0);
        assert_eq!(binomial_u128(200, 100).map(|_| ()), None);
    }

    #[test]
    fn rational_parsing() {
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(parse_rational("1/2"), Some(half.clone()));
        assert_eq!(parse_rational("0.5"), Some(half));
        assert_eq!(
            parse_rational("0.1"),
            Some(BigRational::new(1.into(), 10.into()))
        );
        assert_eq!(parse_rational("3"), Some(BigRational::from_integer(3.into())));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(rational_string(&BigRational::new(6.into(), 4.into())), "3/2");
    }

    #[test]
    fn weights_convert_exactly() {
        let w = BigRational::from_weight(0.1);
        assert_eq!(Scalar::to_f64(&w), 0.1);
        assert_ne!(w, BigRational::new(1.into(), 10.into()));
    }
}
