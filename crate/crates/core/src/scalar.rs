//! Numeric field abstraction shared by every algorithm in the crate.
//!
//! Two implementations exist: [`Rational`] (arbitrary precision, exact, the
//! default) and `f64` (fast, compared against a tolerance). Algorithms are
//! written once against [`Scalar`]; in exact mode all tolerances are zero.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Exact rational number.
pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialOrd
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `true` when arithmetic is exact and tolerances collapse to zero.
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    /// Exact conversion for `Rational` (binary expansion of the float).
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn to_rational(&self) -> Rational;
    /// Zero for exact arithmetic, `1e-9` for floats.
    fn default_tol() -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    fn magnitude(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Sign of `self` where values within `tol` of zero count as zero.
    fn sign_tol(&self, tol: &Self) -> Ordering {
        if *self > *tol {
            Ordering::Greater
        } else if *self < -tol.clone() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }

    fn is_zero_tol(&self, tol: &Self) -> bool {
        self.sign_tol(tol) == Ordering::Equal
    }

    fn near(&self, other: &Self, tol: &Self) -> bool {
        (self.clone() - other.clone()).is_zero_tol(tol)
    }

    fn recip(&self) -> Self {
        Self::one() / self.clone()
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn from_f64(x: f64) -> Self {
        Rational::from_float(x).expect("finite float")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> Rational {
        self.clone()
    }

    fn default_tol() -> Self {
        Rational::zero()
    }

    fn magnitude(&self) -> Self {
        self.abs()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_rational(&self) -> Rational {
        Rational::from_float(*self).unwrap_or_else(Rational::zero)
    }

    fn default_tol() -> Self {
        1e-9
    }

    fn magnitude(&self) -> Self {
        self.abs()
    }
}

/// Parses `"3"`, `"-1/3"`, `"0.25"` or `"1e-2"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let num = parse_rational(n)?;
        let den = parse_rational(d)?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(num / den);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let numer: BigInt = all.parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(numer);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

/// Simplest rational within `tol` of `x`, searched by continued fractions with
/// denominators up to `max_den`.
pub fn simplest_rational_near(x: f64, tol: f64, max_den: i64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            return None;
        }
        let approx = h2 as f64 / k2 as f64;
        if (approx - x).abs() <= tol {
            let num = BigInt::from_i128(h2)?;
            let den = BigInt::from_i128(k2)?;
            return Some(Rational::new(num, den));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = rest - a;
        if frac.abs() < 1e-300 {
            return None;
        }
        rest = 1.0 / frac;
    }
    None
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}
