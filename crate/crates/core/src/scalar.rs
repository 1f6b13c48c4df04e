//! Numeric domains.
//!
//! Every algorithm in this crate is generic over [`Scalar`], which is
//! implemented for exact rationals ([`Rational`]) and for `f64`. Exact
//! arithmetic ignores the [`Tolerance`]; float arithmetic uses it for every
//! comparison that is an equality or a strict inequality in exact terms.

use alloc::string::String;
use core::cmp::Ordering;
use core::fmt::{Debug, Display};
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero as _};

/// Arbitrary precision rational number.
pub type Rational = num_rational::BigRational;

/// Field operations plus the handful of conversions the algorithms need.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// `true` for rationals: no rounding, comparisons are exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    /// `num / den`; `den` must be non-zero.
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Lossy for rationals without a finite binary expansion.
    fn from_f64(v: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;
    fn is_finite(&self) -> bool;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn half(&self) -> Self {
        self.clone() / Self::from_i64(2)
    }

    fn max_of(a: &Self, b: &Self) -> Self {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    fn min_of(a: &Self, b: &Self) -> Self {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    /// Short textual form: `"p/q"` for rationals, shortest round-trip form for floats.
    fn to_text(&self) -> String {
        alloc::format!("{self}")
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn abs(&self) -> Self {
        libm::fabs(*self)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        <Rational as num_traits::Zero>::zero()
    }
    fn one() -> Self {
        Rational::from_integer(BigInt::from(1))
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_f64(v: f64) -> Option<Self> {
        <Rational as FromPrimitive>::from_f64(v)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_finite(&self) -> bool {
        true
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

/// Comparison tolerance for float mode.
///
/// The effective epsilon is `eps * max(1, magnitude)` where the magnitude is
/// the sup-norm of the data the comparison is about (see [`Tolerance::scaled`]).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { eps: Self::DEFAULT_EPS }
    }
}

impl Tolerance {
    pub const DEFAULT_EPS: f64 = 1e-9;

    pub fn new(eps: f64) -> Self {
        Tolerance { eps: libm::fabs(eps) }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn scaled(self, magnitude: f64) -> Self {
        let m = libm::fabs(magnitude);
        Tolerance { eps: self.eps * if m > 1.0 { m } else { 1.0 } }
    }

    pub fn sign<S: Scalar>(&self, x: &S) -> Ordering {
        if S::EXACT {
            x.partial_cmp(&S::zero()).unwrap_or(Ordering::Equal)
        } else {
            let v = x.to_f64();
            if libm::fabs(v) <= self.eps {
                Ordering::Equal
            } else if v > 0.0 {
                Ordering::Greater
            } else {
                Ordering::Less
            }
        }
    }

    pub fn cmp<S: Scalar>(&self, a: &S, b: &S) -> Ordering {
        self.sign(&(a.clone() - b.clone()))
    }

    pub fn is_zero<S: Scalar>(&self, x: &S) -> bool {
        self.sign(x) == Ordering::Equal
    }

    pub fn eq<S: Scalar>(&self, a: &S, b: &S) -> bool {
        self.cmp(a, b) == Ordering::Equal
    }

    pub fn le<S: Scalar>(&self, a: &S, b: &S) -> bool {
        self.cmp(a, b) != Ordering::Greater
    }

    pub fn lt<S: Scalar>(&self, a: &S, b: &S) -> bool {
        self.cmp(a, b) == Ordering::Less
    }

    /// Snap float values within tolerance of `target` onto it; identity for exact scalars.
    pub fn snap<S: Scalar>(&self, x: S, target: &S) -> S {
        if !S::EXACT && self.eq(&x, target) {
            target.clone()
        } else {
            x
        }
    }
}

/// Parse `"p/q"` or `"p"`. Decimal literals are rejected.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_comparisons_ignore_eps() {
        let tol = Tolerance::new(0.5);
        let a = Rational::from_ratio(1, 3);
        let b = Rational::from_ratio(1, 4);
        assert_eq!(tol.cmp(&a, &b), Ordering::Greater);
        assert!(!tol.eq(&a, &b));
    }

    #[test]
    fn float_comparisons_use_scaled_eps() {
        let tol = Tolerance::default().scaled(100.0);
        assert!(tol.eq(&1.0, &(1.0 + 5e-8)));
        assert!(!tol.eq(&1.0, &(1.0 + 5e-6)));
        assert!(tol.lt(&1.0, &1.1));
    }

    #[test]
    fn parses_fractions() {
        assert_eq!(parse_rational("1/3"), Some(Rational::from_ratio(1, 3)));
        assert_eq!(parse_rational("-2"), Some(<Rational as Scalar>::from_i64(-2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("0.5"), None);
    }
}
