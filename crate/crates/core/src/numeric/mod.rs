//! Scalar arithmetic shared by the whole kernel.
//!
//! Three evaluation modes are supported: exact constructible reals
//! ([`ExactScalar`]), plain binary64, and binary64 with decimal display
//! snapping. Geometry code is written once against the [`Scalar`] trait.

pub(crate) mod display;
mod exact;
mod interval;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

pub use display::{round_display, Decimal};
pub use exact::{ExactScalar, RationalInterval, Tower, MAX_SIGN_PRECISION, MAX_TOWER_DEPTH};
pub use interval::Interval;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of a negative value")]
    NegativeRadicand,
    #[error("tower depth limit of {max} generators exceeded")]
    TowerDepthExceeded { max: usize },
    #[error("sign undecided after {bits} bits of precision")]
    PrecisionCapExceeded { bits: u64 },
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("value is not finite")]
    NonFinite,
}

impl NumericError {
    /// True for the errors that come from an internal resource bound rather
    /// than from the input itself.
    pub fn is_limit(&self) -> bool {
        matches!(self, NumericError::TowerDepthExceeded { .. } | NumericError::PrecisionCapExceeded { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

#[allow(clippy::should_implement_trait)]
impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn of_f64(x: f64) -> Sign {
        if x > 0.0 {
            Sign::Positive
        } else if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn mul(self, other: Sign) -> Sign {
        match self.as_i8() * other.as_i8() {
            1 => Sign::Positive,
            -1 => Sign::Negative,
            _ => Sign::Zero,
        }
    }
}

/// How a construction is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ScalarMode {
    #[default]
    Exact,
    Float,
    /// binary64 with free inputs and reported values snapped to `k` decimals.
    DisplayRounded(u32),
}

impl ScalarMode {
    pub const DEFAULT_DECIMALS: u32 = 2;

    pub fn decimals(self) -> Option<u32> {
        match self {
            ScalarMode::DisplayRounded(k) => Some(k),
            _ => None,
        }
    }
}

impl fmt::Display for ScalarMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarMode::Exact => f.write_str("exact"),
            ScalarMode::Float => f.write_str("float"),
            ScalarMode::DisplayRounded(k) => write!(f, "display({k})"),
        }
    }
}

/// Field operations the geometry layer needs from a number type.
///
/// Every operation is fallible: exact arithmetic can hit the tower depth
/// cap, and both representations reject division by zero and square roots
/// of negative values.
pub trait Scalar: Clone + fmt::Debug + Send + Sync + 'static {
    /// Whether comparisons on this type are decided exactly.
    const EXACT: bool;

    fn from_rational(q: &BigRational) -> Self;
    fn add(&self, rhs: &Self) -> Result<Self, NumericError>;
    fn sub(&self, rhs: &Self) -> Result<Self, NumericError>;
    fn mul(&self, rhs: &Self) -> Result<Self, NumericError>;
    fn div(&self, rhs: &Self) -> Result<Self, NumericError>;
    fn neg(&self) -> Self;
    fn sqrt(&self) -> Result<Self, NumericError>;
    fn sign(&self) -> Result<Sign, NumericError>;
    fn to_f64(&self) -> f64;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }

    fn zero() -> Self {
        Self::from_i64(0)
    }

    fn is_zero(&self) -> Result<bool, NumericError> {
        Ok(self.sign()? == Sign::Zero)
    }

    fn square(&self) -> Result<Self, NumericError> {
        self.mul(self)
    }

    fn abs(&self) -> Result<Self, NumericError> {
        Ok(if self.sign()? == Sign::Negative { self.neg() } else { self.clone() })
    }

    /// Exact equality test (binary64 equality for floats).
    fn equals(&self, rhs: &Self) -> Result<bool, NumericError> {
        self.sub(rhs)?.is_zero()
    }
}

impl Scalar for ExactScalar {
    const EXACT: bool = true;

    fn from_rational(q: &BigRational) -> Self {
        ExactScalar::from_rational(q.clone())
    }
    fn add(&self, rhs: &Self) -> Result<Self, NumericError> {
        ExactScalar::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Result<Self, NumericError> {
        ExactScalar::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Result<Self, NumericError> {
        ExactScalar::mul(self, rhs)
    }
    fn div(&self, rhs: &Self) -> Result<Self, NumericError> {
        ExactScalar::div(self, rhs)
    }
    fn neg(&self) -> Self {
        ExactScalar::neg(self)
    }
    fn sqrt(&self) -> Result<Self, NumericError> {
        ExactScalar::sqrt(self)
    }
    fn sign(&self) -> Result<Sign, NumericError> {
        ExactScalar::sign(self)
    }
    fn to_f64(&self) -> f64 {
        ExactScalar::to_f64(self)
    }
    fn is_zero(&self) -> Result<bool, NumericError> {
        Ok(ExactScalar::is_zero(self))
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_rational(q: &BigRational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }
    fn add(&self, rhs: &Self) -> Result<Self, NumericError> {
        finite(self + rhs)
    }
    fn sub(&self, rhs: &Self) -> Result<Self, NumericError> {
        finite(self - rhs)
    }
    fn mul(&self, rhs: &Self) -> Result<Self, NumericError> {
        finite(self * rhs)
    }
    fn div(&self, rhs: &Self) -> Result<Self, NumericError> {
        if *rhs == 0.0 {
            return Err(NumericError::DivisionByZero);
        }
        finite(self / rhs)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn sqrt(&self) -> Result<Self, NumericError> {
        if *self < 0.0 {
            return Err(NumericError::NegativeRadicand);
        }
        Ok(f64::sqrt(*self))
    }
    fn sign(&self) -> Result<Sign, NumericError> {
        if self.is_nan() {
            return Err(NumericError::NonFinite);
        }
        Ok(Sign::of_f64(*self))
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

fn finite(x: f64) -> Result<f64, NumericError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(NumericError::NonFinite)
    }
}

/// Parses `12`, `-2.97`, `1/3` or `-7/20` into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    if body.is_empty() || body.starts_with('-') || body.starts_with('+') {
        return None;
    }
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mantissa: BigInt = digits.parse().ok()?;
    let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
    let q = BigRational::new(mantissa, scale);
    Some(if neg { -q } else { q })
}

/// Prints a rational as a terminating decimal when it has one, else `n/d`.
pub fn format_rational(q: &BigRational) -> String {
    use num_integer::Integer;
    let mut d = q.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0u32, 0u32);
    while d.is_even() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if d != BigInt::from(1) {
        return format!("{}/{}", q.numer(), q.denom());
    }
    let scale = twos.max(fives);
    if scale == 0 {
        return q.numer().to_string();
    }
    let scaled = (q * BigRational::from_integer(BigInt::from(10).pow(scale))).to_integer();
    let neg = scaled < BigInt::zero();
    let digits = if neg { (-scaled).to_string() } else { scaled.to_string() };
    let digits = format!("{:0>width$}", digits, width = scale as usize + 1);
    let (int_part, frac_part) = digits.split_at(digits.len() - scale as usize);
    format!("{}{}.{}", if neg { "-" } else { "" }, int_part, frac_part)
}
