//! Decimal display rounding.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::NumericError;

/// A decimal number `mantissa · 10^-scale`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Decimal {
    pub mantissa: BigInt,
    pub scale: u32,
}

impl Decimal {
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.mantissa.clone(), BigInt::from(10).pow(self.scale))
    }

    pub fn to_f64(&self) -> f64 {
        // parse of the decimal text is correctly rounded
        self.to_fixed().parse().unwrap_or(f64::NAN)
    }

    /// All `scale` digits, e.g. `24.90`.
    pub fn to_fixed(&self) -> String {
        let neg = self.mantissa.is_negative();
        let digits = self.mantissa.abs().to_string();
        let sign = if neg { "-" } else { "" };
        if self.scale == 0 {
            return format!("{sign}{digits}");
        }
        let digits = format!("{:0>width$}", digits, width = self.scale as usize + 1);
        let (i, f) = digits.split_at(digits.len() - self.scale as usize);
        format!("{sign}{i}.{f}")
    }
}

/// Trailing zeros dropped, e.g. `24.9`, `5`.
impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fixed = self.to_fixed();
        let text = if fixed.contains('.') { fixed.trim_end_matches('0').trim_end_matches('.') } else { &fixed };
        if text == "-0" {
            return f.write_str("0");
        }
        f.write_str(text)
    }
}

/// Rounds `x` to `k` decimals, halves away from zero.
///
/// Rounding acts on the shortest decimal representation that round-trips
/// to `x`, so `2.455` displays as `2.46` even though the nearest binary64
/// lies slightly below it.
pub fn round_display(x: f64, k: u32) -> Result<Decimal, NumericError> {
    if !x.is_finite() {
        return Err(NumericError::NonFinite);
    }
    let text = format!("{x:e}");
    let (mant, exp) = text.split_once('e').expect("exponent form");
    let exp: i64 = exp.parse().expect("exponent");
    let neg = mant.starts_with('-');
    let mant = mant.trim_start_matches('-');
    let frac_len = mant.split_once('.').map_or(0, |(_, f)| f.len()) as i64;
    let digits: BigInt = mant.replace('.', "").parse().expect("digits");
    // |x| = digits · 10^(exp − frac_len)
    let shift = exp - frac_len + k as i64;
    let magnitude = if shift >= 0 {
        digits * BigInt::from(10).pow(shift as u32)
    } else {
        let div = BigInt::from(10).pow((-shift) as u32);
        let (q, r) = digits.div_rem(&div);
        if r * 2 >= div {
            q + 1
        } else {
            q
        }
    };
    let mantissa = if neg && !magnitude.is_zero() { -magnitude } else { magnitude };
    Ok(Decimal { mantissa, scale: k })
}

/// `round_display` as a binary64 value.
pub(crate) fn snap(x: f64, k: u32) -> Result<f64, NumericError> {
    Ok(round_display(x, k)?.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_away_from_zero() {
        assert_eq!(round_display(2.455, 2).unwrap().to_string(), "2.46");
        assert_eq!(round_display(-2.455, 2).unwrap().to_string(), "-2.46");
        assert_eq!(round_display(-5.674999, 2).unwrap().to_string(), "-5.67");
        assert_eq!(round_display(24.9512, 2).unwrap().to_string(), "24.95");
        assert_eq!(round_display(0.5, 0).unwrap().to_string(), "1");
        assert_eq!(round_display(-0.004, 2).unwrap().to_string(), "0");
        assert_eq!(round_display(60.1, 2).unwrap().to_fixed(), "60.10");
        assert_eq!(round_display(1e-7, 2).unwrap().to_string(), "0");
        assert_eq!(round_display(123456.0, 2).unwrap().to_string(), "123456");
    }

    #[test]
    fn non_finite() {
        assert_eq!(round_display(f64::NAN, 2), Err(NumericError::NonFinite));
        assert_eq!(round_display(f64::INFINITY, 2), Err(NumericError::NonFinite));
    }

    #[test]
    fn exact_rational_value() {
        let d = round_display(1.0 / 3.0, 2).unwrap();
        assert_eq!(d.to_rational(), BigRational::new(33.into(), 100.into()));
    }
}
