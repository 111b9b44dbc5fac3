//! Interval enclosures of expressions over an input interval.

use num_traits::Zero;
use thiserror::Error;

use super::expr::Expr;
use crate::numeric::{Interval, RationalInterval};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EncloseError {
    /// The whole input interval lies outside the domain.
    #[error("domain violation: {0}")]
    DomainViolation(String),
}

/// An enclosure together with a totality flag: `total` means the
/// expression is certainly defined at every point of the input.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Enclosure {
    pub range: Interval,
    pub total: bool,
}

pub(crate) fn const_interval(q: &num_rational::BigRational) -> Interval {
    RationalInterval::point(q.clone()).to_f64_outward()
}

/// Encloses `{ e(x) : x ∈ xs, e defined at x }`.
pub fn eval_interval(e: &Expr, xs: Interval) -> Result<Interval, EncloseError> {
    enclose(e, xs).map(|en| en.range)
}

pub fn enclose(e: &Expr, xs: Interval) -> Result<Enclosure, EncloseError> {
    let total = |range: Interval, total: bool| Ok(Enclosure { range, total });
    let undefined = |what: &str| Err(EncloseError::DomainViolation(format!("{what} undefined on {xs}")));
    match e {
        Expr::X => total(xs, true),
        Expr::Const(q) => total(const_interval(q), true),
        Expr::Neg(a) => {
            let a = enclose(a, xs)?;
            total(a.range.neg(), a.total)
        }
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
            let (a_, b_) = (enclose(a, xs)?, enclose(b, xs)?);
            let r = match e {
                Expr::Add(..) => a_.range.add(&b_.range),
                Expr::Sub(..) => a_.range.sub(&b_.range),
                _ => a_.range.mul(&b_.range),
            };
            total(r, a_.total && b_.total)
        }
        Expr::Div(a, b) => {
            let (n, d) = (enclose(a, xs)?, enclose(b, xs)?);
            divide(n, d).ok_or(()).or_else(|_| undefined("quotient"))
        }
        Expr::Pow(a, n) => {
            let a = enclose(a, xs)?;
            let p = a.range.powi(n.unsigned_abs().min(u32::MAX as u64) as u32);
            let p = Enclosure { range: p, total: a.total };
            if *n >= 0 {
                return Ok(p);
            }
            let one = Enclosure { range: Interval::point(1.0), total: true };
            divide(one, p).ok_or(()).or_else(|_| undefined("negative power"))
        }
        Expr::Sin(a) => {
            let a = enclose(a, xs)?;
            total(a.range.sin(), a.total)
        }
        Expr::Cos(a) => {
            let a = enclose(a, xs)?;
            total(a.range.cos(), a.total)
        }
        Expr::Exp(a) => {
            let a = enclose(a, xs)?;
            total(a.range.exp(), a.total)
        }
        Expr::Abs(a) => {
            let a = enclose(a, xs)?;
            total(a.range.abs(), a.total)
        }
        Expr::Ln(a) => {
            let a = enclose(a, xs)?;
            match a.range.ln_extended() {
                None => undefined("ln"),
                Some(r) => total(r, a.total && a.range.lo > 0.0),
            }
        }
        Expr::Sqrt(a) => {
            let a = enclose(a, xs)?;
            if a.range.hi < 0.0 {
                return undefined("sqrt");
            }
            let r = a.range.sqrt().expect("nonnegative part exists");
            total(r, a.total && a.range.lo >= 0.0)
        }
    }
}

fn divide(n: Enclosure, d: Enclosure) -> Option<Enclosure> {
    if d.range.lo.is_zero() && d.range.hi.is_zero() {
        return None;
    }
    if d.range.contains_zero() {
        let r = n.range.div_extended(&d.range)?;
        return Some(Enclosure { range: r, total: false });
    }
    let r = n.range.div(&d.range).ok()?;
    Some(Enclosure { range: r, total: n.total && d.total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::parse_expr;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi)
    }

    #[test]
    fn domains() {
        let e = parse_expr("ln(x)").unwrap();
        assert!(eval_interval(&e, iv(-2.0, -1.0)).is_err());
        let en = enclose(&e, iv(-1.0, 1.0)).unwrap();
        assert!(!en.total && en.range.lo == f64::NEG_INFINITY);
        assert!(enclose(&e, iv(1.0, 2.0)).unwrap().total);
        let g = parse_expr("sin(x)/x").unwrap();
        assert!(!enclose(&g, iv(-1.0, 1.0)).unwrap().total);
        assert!(eval_interval(&parse_expr("1/(x-x)").unwrap(), iv(1.0, 1.0)).is_err());
    }

    #[test]
    fn encloses_samples() {
        let e = parse_expr("x*sin(1/x) + exp(-x^2)").unwrap();
        let r = eval_interval(&e, iv(0.1, 0.3)).unwrap();
        for i in 0..=100 {
            let x = (0.1 + 0.2 * i as f64 / 100.0).min(0.3);
            assert!(r.contains(e.eval(x).unwrap()));
        }
    }
}
