//! Closed intervals with binary64 endpoints.
//!
//! Each operation computes the endpoint results in round-to-nearest and then
//! widens them outward by one ulp, unless an error-free transformation
//! (TwoSum / FMA residual) proves the endpoint exact. Transcendental
//! endpoints are widened by two ulps and clamped to the function's range.
//! Endpoints may be infinite; `0 · ∞` is taken as `0` in endpoint products.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::NumericError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

/// Below this magnitude FMA residuals may be inexact because of underflow.
const TINY: f64 = 1e-290;

fn down(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        x
    } else {
        x.next_down()
    }
}

fn up(x: f64) -> f64 {
    if x == f64::INFINITY {
        x
    } else {
        x.next_up()
    }
}

fn sum_is_exact(a: f64, b: f64, s: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return true;
    }
    if s.is_infinite() {
        return false;
    }
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    err == 0.0
}

fn mul_endpoint(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

fn product_is_exact(a: f64, b: f64, p: f64) -> bool {
    if p == 0.0 {
        return a == 0.0 || b == 0.0;
    }
    if a.is_infinite() || b.is_infinite() {
        return true;
    }
    if p.is_infinite() || p.abs() < TINY {
        return false;
    }
    a.mul_add(b, -p) == 0.0
}

fn quotient_is_exact(a: f64, b: f64, q: f64) -> bool {
    if a == 0.0 || a.is_infinite() || b.is_infinite() {
        return true;
    }
    if q.is_infinite() || q == 0.0 || q.abs() < TINY {
        return false;
    }
    q.mul_add(b, -a) == 0.0
}

fn widen2_down(x: f64) -> f64 {
    down(down(x))
}

fn widen2_up(x: f64) -> f64 {
    up(up(x))
}

/// Whether `[a, b]` may contain a point `offset + 2kπ` for integer `k`.
/// Errs on the side of `true`.
fn may_contain_phase(a: f64, b: f64, offset: f64) -> bool {
    let ta = (a - offset) / TAU;
    let tb = (b - offset) / TAU;
    let slack = |t: f64| 1e-9 * (1.0 + t.abs());
    let k = (ta - slack(ta)).ceil();
    k <= tb + slack(tb)
}

impl Interval {
    pub const ENTIRE: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    /// Panics if `lo > hi` or an endpoint is NaN.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "invalid interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval::new(x, x)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        if self.lo.is_infinite() || self.hi.is_infinite() {
            if self.lo.is_infinite() && self.hi.is_infinite() {
                return 0.0;
            }
            return if self.lo.is_infinite() { self.hi } else { self.lo };
        }
        self.lo + (self.hi - self.lo) / 2.0
    }

    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    pub fn encloses(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then(|| Interval::new(lo, hi))
    }

    pub fn neg(&self) -> Interval {
        Interval::new(-self.hi, -self.lo)
    }

    pub fn add(&self, rhs: &Interval) -> Interval {
        let lo = self.lo + rhs.lo;
        let hi = self.hi + rhs.hi;
        let lo = if sum_is_exact(self.lo, rhs.lo, lo) { lo } else { down(lo) };
        let hi = if sum_is_exact(self.hi, rhs.hi, hi) { hi } else { up(hi) };
        // ∞ − ∞ only arises from degenerate infinite endpoints
        let lo = if lo.is_nan() { f64::NEG_INFINITY } else { lo };
        let hi = if hi.is_nan() { f64::INFINITY } else { hi };
        Interval::new(lo, hi)
    }

    pub fn sub(&self, rhs: &Interval) -> Interval {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Interval) -> Interval {
        let pairs = [(self.lo, rhs.lo), (self.lo, rhs.hi), (self.hi, rhs.lo), (self.hi, rhs.hi)];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (a, b) in pairs {
            let p = mul_endpoint(a, b);
            let exact = product_is_exact(a, b, p);
            lo = lo.min(if exact { p } else { down(p) });
            hi = hi.max(if exact { p } else { up(p) });
        }
        Interval::new(lo, hi)
    }

    pub fn scale(&self, s: f64) -> Interval {
        self.mul(&Interval::point(s))
    }

    /// Quotient; the divisor must not contain zero.
    pub fn div(&self, rhs: &Interval) -> Result<Interval, NumericError> {
        if rhs.contains_zero() {
            return Err(NumericError::DomainViolation(format!(
                "division by an interval containing zero: [{}, {}]",
                rhs.lo, rhs.hi
            )));
        }
        Ok(self.div_nonzero(rhs))
    }

    fn div_nonzero(&self, rhs: &Interval) -> Interval {
        let pairs = [(self.lo, rhs.lo), (self.lo, rhs.hi), (self.hi, rhs.lo), (self.hi, rhs.hi)];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (a, b) in pairs {
            let q = if a.is_infinite() && b.is_infinite() {
                // ∞/∞ cannot be an endpoint of the true image unless the
                // dividend itself is unbounded; treat as unbounded
                if (a > 0.0) == (b > 0.0) {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                }
            } else {
                a / b
            };
            let exact = quotient_is_exact(a, b, q);
            lo = lo.min(if exact { q } else { down(q) });
            hi = hi.max(if exact { q } else { up(q) });
        }
        Interval::new(lo, hi)
    }

    /// Image of `x / y` over the points of `rhs` different from zero.
    /// `None` when the divisor is exactly `[0, 0]`.
    pub fn div_extended(&self, rhs: &Interval) -> Option<Interval> {
        if !rhs.contains_zero() {
            return Some(self.div_nonzero(rhs));
        }
        if rhs.lo == 0.0 && rhs.hi == 0.0 {
            return None;
        }
        if self.lo == 0.0 && self.hi == 0.0 {
            return Some(Interval::point(0.0));
        }
        if rhs.lo < 0.0 && rhs.hi > 0.0 {
            return Some(Interval::ENTIRE);
        }
        // divisor touches zero at one end only: one side is unbounded
        let positive_divisor = rhs.lo == 0.0;
        let inner = if positive_divisor {
            Interval::new(f64::MIN_POSITIVE * f64::EPSILON, rhs.hi)
        } else {
            Interval::new(rhs.lo, -(f64::MIN_POSITIVE * f64::EPSILON))
        };
        if self.lo >= 0.0 {
            let q = self.div_nonzero(&inner);
            Some(if positive_divisor {
                Interval::new(q.lo, f64::INFINITY)
            } else {
                Interval::new(f64::NEG_INFINITY, q.hi)
            })
        } else if self.hi <= 0.0 {
            let q = self.div_nonzero(&inner);
            Some(if positive_divisor {
                Interval::new(f64::NEG_INFINITY, q.hi)
            } else {
                Interval::new(q.lo, f64::INFINITY)
            })
        } else {
            Some(Interval::ENTIRE)
        }
    }

    /// Square root; the nonnegative part of the argument is used when it
    /// straddles zero.
    pub fn sqrt(&self) -> Result<Interval, NumericError> {
        if self.hi < 0.0 {
            return Err(NumericError::DomainViolation(format!("sqrt of negative interval [{}, {}]", self.lo, self.hi)));
        }
        let a = self.lo.max(0.0);
        let lo = a.sqrt();
        let hi = self.hi.sqrt();
        let lo_exact = lo.is_infinite() || lo.mul_add(lo, -a) == 0.0;
        let hi_exact = hi.is_infinite() || hi.mul_add(hi, -self.hi) == 0.0;
        Ok(Interval::new(if lo_exact { lo } else { down(lo).max(0.0) }, if hi_exact { hi } else { up(hi) }))
    }

    pub fn abs(&self) -> Interval {
        if self.lo >= 0.0 {
            *self
        } else if self.hi <= 0.0 {
            self.neg()
        } else {
            Interval::new(0.0, (-self.lo).max(self.hi))
        }
    }

    /// `x^n` for integer `n ≥ 0`. Endpoint powers are bounded by repeated
    /// multiplication; `x ↦ x^n` is monotone on each half-line.
    pub fn powi(&self, n: u32) -> Interval {
        if n == 0 {
            return Interval::point(1.0);
        }
        let pow = |x: f64| {
            let base = Interval::point(x);
            let mut acc = base;
            for _ in 1..n {
                acc = acc.mul(&base);
            }
            acc
        };
        if n % 2 == 1 {
            return Interval::new(pow(self.lo).lo, pow(self.hi).hi);
        }
        let a = self.abs();
        Interval::new(pow(a.lo).lo.max(0.0), pow(a.hi).hi)
    }

    pub fn exp(&self) -> Interval {
        let lo = if self.lo == 0.0 { 1.0 } else { widen2_down(self.lo.exp()).max(0.0) };
        let hi = if self.hi == 0.0 { 1.0 } else { widen2_up(self.hi.exp()) };
        let hi = if self.hi == f64::NEG_INFINITY { 0.0 } else { hi };
        Interval::new(lo, hi.max(lo))
    }

    /// Natural log; the argument must be strictly positive.
    pub fn ln(&self) -> Result<Interval, NumericError> {
        if self.lo <= 0.0 {
            return Err(NumericError::DomainViolation(format!(
                "ln of interval touching nonpositive values: [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(self.ln_positive())
    }

    /// `ln` of the positive part; `None` when nothing is positive.
    pub fn ln_extended(&self) -> Option<Interval> {
        if self.hi <= 0.0 {
            return None;
        }
        if self.lo <= 0.0 {
            let hi = Interval::new(self.hi, self.hi).ln_positive().hi;
            return Some(Interval::new(f64::NEG_INFINITY, hi));
        }
        Some(self.ln_positive())
    }

    fn ln_positive(&self) -> Interval {
        let f = |x: f64, lower: bool| {
            if x == 1.0 {
                0.0
            } else if x.is_infinite() {
                x
            } else if lower {
                widen2_down(x.ln())
            } else {
                widen2_up(x.ln())
            }
        };
        Interval::new(f(self.lo, true), f(self.hi, false))
    }

    pub fn sin(&self) -> Interval {
        self.periodic(f64::sin, FRAC_PI_2, -FRAC_PI_2, |x| x == 0.0, 0.0)
    }

    pub fn cos(&self) -> Interval {
        self.periodic(f64::cos, 0.0, PI, |x| x == 0.0, 1.0)
    }

    fn periodic(
        &self,
        f: fn(f64) -> f64,
        max_at: f64,
        min_at: f64,
        exact_at: fn(f64) -> bool,
        exact_value: f64,
    ) -> Interval {
        let full = Interval::new(-1.0, 1.0);
        if !self.is_bounded() || self.width() >= TAU || self.mag() > 1e12 {
            return full;
        }
        let eval = |x: f64, lower: bool| {
            if exact_at(x) {
                exact_value
            } else if lower {
                widen2_down(f(x)).max(-1.0)
            } else {
                widen2_up(f(x)).min(1.0)
            }
        };
        let lo = eval(self.lo, true).min(eval(self.hi, true));
        let hi = eval(self.lo, false).max(eval(self.hi, false));
        let hi = if may_contain_phase(self.lo, self.hi, max_at) { 1.0 } else { hi };
        let lo = if may_contain_phase(self.lo, self.hi, min_at) { -1.0 } else { lo };
        Interval::new(lo, hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
