//! Exact coefficient fields: arbitrary-precision rationals and Gaussian rationals.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;

/// Exact rational number, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// `a + b i` with rational `a`, `b`.
pub type GaussianRational = Complex<Rational>;

/// Shorthand constructor `num / den`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `7`, `-3/4`, `+2`. Floating-point literals are rejected.
pub fn parse_rational(text: &str) -> Result<Rational, ParseError> {
    let s = text.trim();
    let bad = || ParseError::new(format!("not an exact rational literal: {text:?}"), 0);
    if s.is_empty() || s.contains(['.', 'e', 'E']) {
        return Err(bad());
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(ParseError::new(format!("zero denominator in {text:?}"), 0));
    }
    Ok(Rational::new(num, den))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact conversion of a finite double.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Least common multiple of the denominators.
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// Coefficient ring of polynomials and graded elements.
pub trait Coefficient:
    Clone
    + Debug
    + PartialEq
    + Eq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_rational(r: Rational) -> Self;

    /// Splits into a sign and a printable magnitude. `None` magnitude means 1.
    fn render(&self) -> (bool, Option<String>);

    /// Returns the value if it is real.
    fn as_real(&self) -> Option<&Rational>;

    fn to_f64_lossy(&self) -> f64;
}

impl Coefficient for Rational {
    fn from_rational(r: Rational) -> Self {
        r
    }

    fn render(&self) -> (bool, Option<String>) {
        let neg = self.is_negative();
        let abs = self.abs();
        if abs.is_one() {
            (neg, None)
        } else {
            (neg, Some(abs.to_string()))
        }
    }

    fn as_real(&self) -> Option<&Rational> {
        Some(self)
    }

    fn to_f64_lossy(&self) -> f64 {
        to_f64(self)
    }
}

impl Coefficient for GaussianRational {
    fn from_rational(r: Rational) -> Self {
        Complex::new(r, Rational::zero())
    }

    fn render(&self) -> (bool, Option<String>) {
        if self.im.is_zero() {
            return self.re.render();
        }
        if self.re.is_zero() {
            let (neg, mag) = self.im.render();
            return match mag {
                None => (neg, Some("i".to_string())),
                Some(m) => (neg, Some(format!("{m}*i"))),
            };
        }
        let sign = if self.im.is_negative() { '-' } else { '+' };
        (
            false,
            Some(format!("({}{}{}*i)", self.re, sign, self.im.abs())),
        )
    }

    fn as_real(&self) -> Option<&Rational> {
        self.im.is_zero().then_some(&self.re)
    }

    fn to_f64_lossy(&self) -> f64 {
        to_f64(&self.re)
    }
}

/// The imaginary unit.
pub fn imaginary_unit() -> GaussianRational {
    Complex::new(Rational::zero(), Rational::one())
}
