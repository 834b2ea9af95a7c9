//! Scalar fields used throughout the crate: exact rationals and binary64.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Q = BigRational;

/// Relative threshold below which a float entry is treated as zero during
/// elimination.
pub const FLOAT_PIVOT_EPS: f64 = 1e-12;

pub trait Scalar:
    Clone + Debug + PartialEq + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;

    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    /// Whether the value counts as zero next to entries of size `scale`.
    fn negligible(&self, scale: f64) -> bool;

    fn gt_zero(&self) -> bool {
        *self > Self::zero()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn negligible(&self, scale: f64) -> bool {
        self.abs() <= FLOAT_PIVOT_EPS * scale.max(f64::MIN_POSITIVE)
    }
}

impl Scalar for Q {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Q::from_integer(BigInt::from(v))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            if self.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }

    fn negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }
}

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(v: i64) -> Q {
    Q::from_i64(v)
}

/// Exact binary value of a finite float.
pub fn q_from_f64(x: f64) -> Result<Q> {
    Q::from_float(x).ok_or_else(|| Error::Invalid(format!("non-finite value {x}")))
}

/// Rational approximation on the dyadic grid 2^-bits.
pub fn q_dyadic(x: f64, bits: u32) -> Q {
    let scale = (1u64 << bits) as f64;
    let num = (x * scale).round() as i64;
    Q::new(BigInt::from(num), BigInt::from(1u64 << bits))
}

/// `"p/q"`, or `"p"` for integers.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => {
            if let Ok(n) = s.parse::<BigInt>() {
                return Ok(Q::from_integer(n));
            }
            let x: f64 = s.parse().map_err(|_| bad())?;
            q_from_f64(x)
        }
    }
}

/// Decimal string with 17 significant digits. Plain notation for moderate
/// magnitudes, scientific otherwise.
pub fn fmt_decimal(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "Infinity".into()
        } else {
            "-Infinity".into()
        };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-6..17).contains(&exp) {
        let after = (16 - exp).max(0) as usize;
        format!("{x:.after$}")
    } else {
        format!("{x:.16e}")
    }
}

pub fn parse_decimal(s: &str) -> Result<f64> {
    match s.trim() {
        "Infinity" => Ok(f64::INFINITY),
        "-Infinity" => Ok(f64::NEG_INFINITY),
        t => t
            .parse()
            .map_err(|_| Error::Parse(format!("not a decimal: {s:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_strings() {
        assert_eq!(fmt_q(&q(6, -4)), "-3/2");
        assert_eq!(fmt_q(&qi(7)), "7");
        assert_eq!(parse_q("-3/2").unwrap(), q(-3, 2));
        assert_eq!(parse_q("0.5").unwrap(), q(1, 2));
        assert!(parse_q("1/0").is_err());
    }

    #[test]
    fn decimal_strings_keep_17_digits() {
        let x = 1.0 / (2.0 + 2f64.sqrt());
        let s = fmt_decimal(x);
        assert!(s.starts_with("0.292893218813452"), "{s}");
        assert_eq!(parse_decimal(&s).unwrap(), x);
        assert_eq!(parse_decimal(&fmt_decimal(1e-30)).unwrap(), 1e-30);
        assert_eq!(fmt_decimal(0.0), "0");
    }
}
