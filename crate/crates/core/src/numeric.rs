//! The two numeric modes shared by every value object: exact
//! [`BigRational`] arithmetic for equality-grade checks, and `f64` for
//! sweeps.
//!
//! The [`Scalar`] trait abstracts over both so the model, bound, and
//! enumeration code is written once. Mode mismatches are type errors;
//! the serialized form carries an explicit [`Mode`] tag instead.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance for float-mode sum and mean validation.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum NumericParseError {
    #[error("empty numeric literal")]
    Empty,
    #[error("invalid numeric literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("`{0}` is not representable (non-finite)")]
    NonFinite(String),
}

/// Numeric mode tag used at serialization and CLI boundaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Rational,
    Float,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Rational => "rational",
            Mode::Float => "float",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A number usable in either validation mode.
///
/// `EXACT` selects the comparison discipline: exact equality for
/// rationals, absolute tolerance for floats. Values are expected to be
/// finite; `is_finite_value` is what the validators call before doing
/// arithmetic that would propagate NaN.
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    const EXACT: bool;
    const MODE: Mode;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_usize(n: usize) -> Self;
    /// Lossy embedding of an `f64`; only meaningful on code paths that
    /// are already approximate (e.g. log-space products).
    fn from_f64_lossy(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn is_finite_value(&self) -> bool;
    fn parse_text(text: &str) -> Result<Self, NumericParseError>;
    fn render_text(&self) -> String;

    /// Mode-aware equality: exact in rational mode, within `tol`
    /// absolute in float mode.
    fn eq_within(&self, other: &Self, tol: f64) -> bool {
        if Self::EXACT {
            self == other
        } else {
            (self.to_f64() - other.to_f64()).abs() <= tol
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const MODE: Mode = Mode::Float;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_usize(n: usize) -> Self {
        n as f64
    }

    fn from_f64_lossy(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }

    fn parse_text(text: &str) -> Result<Self, NumericParseError> {
        let text = text.trim();
        if text.is_empty() {
            return Err(NumericParseError::Empty);
        }
        let value = if let Ok(v) = text.parse::<f64>() {
            v
        } else if let Some((n, d)) = text.split_once('/') {
            let numer: f64 = n
                .trim()
                .parse()
                .map_err(|_| NumericParseError::Invalid(text.to_owned()))?;
            let denom: f64 = d
                .trim()
                .parse()
                .map_err(|_| NumericParseError::Invalid(text.to_owned()))?;
            if denom == 0.0 {
                return Err(NumericParseError::ZeroDenominator(text.to_owned()));
            }
            numer / denom
        } else {
            return Err(NumericParseError::Invalid(text.to_owned()));
        };
        if !value.is_finite() {
            return Err(NumericParseError::NonFinite(text.to_owned()));
        }
        Ok(value)
    }

    fn render_text(&self) -> String {
        format!("{self}")
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    const MODE: Mode = Mode::Rational;

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn from_usize(n: usize) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_f64_lossy(x: f64) -> Self {
        BigRational::from_float(x).unwrap_or_else(Zero::zero)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_finite_value(&self) -> bool {
        true
    }

    fn parse_text(text: &str) -> Result<Self, NumericParseError> {
        parse_rational(text)
    }

    fn render_text(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

/// Shorthand for small rational constants in construction code and tests.
pub fn big_ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses `p/q`, integer, and decimal/scientific literals into an exact
/// rational. Decimals parse exactly (`0.6` is 3/5, not the nearest f64).
fn parse_rational(text: &str) -> Result<BigRational, NumericParseError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(NumericParseError::Empty);
    }
    if let Some((n, d)) = text.split_once('/') {
        let numer: BigInt = n
            .trim()
            .parse()
            .map_err(|_| NumericParseError::Invalid(text.to_owned()))?;
        let denom: BigInt = d
            .trim()
            .parse()
            .map_err(|_| NumericParseError::Invalid(text.to_owned()))?;
        if denom.is_zero() {
            return Err(NumericParseError::ZeroDenominator(text.to_owned()));
        }
        return Ok(BigRational::new(numer, denom));
    }
    parse_decimal(text)
}

fn parse_decimal(text: &str) -> Result<BigRational, NumericParseError> {
    let invalid = || NumericParseError::Invalid(text.to_owned());

    let (mantissa, exponent) = match text.split_once(['e', 'E']) {
        Some((m, e)) => {
            let exp: i64 = e.parse().map_err(|_| invalid())?;
            if exp.abs() > 4000 {
                return Err(invalid());
            }
            (m, exp)
        }
        None => (text, 0),
    };

    let (negative, digits_part) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };

    let (int_part, frac_part) = match digits_part.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits_part, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(invalid());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(invalid());
    }

    let digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = if digits.is_empty() {
        BigInt::from(0)
    } else {
        digits.parse().map_err(|_| invalid())?
    };
    if negative {
        numer = -numer;
    }

    let net = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10);
    if net >= 0 {
        Ok(BigRational::from_integer(
            numer * ten.pow(net as u32),
        ))
    } else {
        Ok(BigRational::new(numer, ten.pow((-net) as u32)))
    }
}

/// True when `value` is strictly positive.
pub fn is_positive<R: Scalar>(value: &R) -> bool {
    *value > R::zero()
}

/// True when `value` is strictly negative.
pub fn is_negative<R: Scalar>(value: &R) -> bool {
    *value < R::zero()
}
