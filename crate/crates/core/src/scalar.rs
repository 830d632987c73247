//! Coefficient fields shared by the exact and floating-point code paths.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::{BigRational, One, Signed, ToPrimitive, Zero};

/// Exact rational numbers.
pub type Q = BigRational;

/// A field the jet and polynomial code can compute over.
///
/// Implemented for exact rationals, `f64`, and dual numbers over either.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Embeds an exact rational.
    fn from_rational(q: &Q) -> Self;

    /// Absolute size, used for pivoting and norm estimates.
    fn magnitude(&self) -> f64;

    /// Nearest float, used when exact values leave the exact code paths.
    fn to_float(&self) -> f64;

    /// Human-readable form for error messages.
    fn render(&self) -> String;
}

impl Scalar for Q {
    fn from_rational(q: &Q) -> Self {
        q.clone()
    }

    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    fn to_float(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

impl Scalar for f64 {
    fn from_rational(q: &Q) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn to_float(&self) -> f64 {
        *self
    }

    fn render(&self) -> String {
        format!("{self}")
    }
}

/// Shorthand for the rational `num/den`.
pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for an integer-valued rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Exact rational value of a finite float.
pub fn q_from_f64(x: f64) -> Option<Q> {
    Q::from_float(x)
}

/// Formats a rational as `"p/q"`; the denominator is always written.
pub fn format_rational(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `"p/q"` or a bare integer `"p"`.
pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Q::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
    }
}

/// Euclidean norm of a float vector.
pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Euclidean distance between two float vectors of equal length.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn factorial(n: u32) -> Q {
    let mut acc = Q::one();
    for i in 2..=n {
        acc *= qi(i as i64);
    }
    acc
}

pub(crate) fn binomial(n: u32, k: u32) -> Q {
    if k > n {
        return Q::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Integer power by repeated multiplication.
pub(crate) fn powi<T: Scalar>(x: &T, e: u32) -> T {
    let mut acc = T::one();
    for _ in 0..e {
        acc = acc * x.clone();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_round_trip() {
        for x in [q(3, 4), q(-7, 2), qi(0), qi(5)] {
            let s = format_rational(&x);
            assert!(s.contains('/'));
            assert_eq!(parse_rational(&s), Some(x));
        }
        assert_eq!(parse_rational("12"), Some(qi(12)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("a/b"), None);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), qi(6));
        assert_eq!(binomial(2, 3), qi(0));
        assert_eq!(factorial(5), qi(120));
    }
}
