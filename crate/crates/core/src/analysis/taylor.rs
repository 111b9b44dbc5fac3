//! Taylor models: an interval-coefficient polynomial in `h = x − c` plus a
//! remainder kept in factored form `h^k · R`.
//!
//! Keeping the power of `h` in the remainder lets a quotient whose numerator
//! and denominator both vanish at the center be divided through by `h^k`
//! without losing rigor.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use super::enclose::const_interval;
use super::expr::Expr;
use crate::numeric::Interval;

type Q = BigRational;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TaylorError {
    #[error("unsupported node: {0}")]
    UnsupportedNode(String),
    #[error("denominator may vanish on the domain")]
    DenominatorMayVanish,
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("expansion point lies outside the domain")]
    PointOutsideDomain,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaylorModel {
    center: Q,
    domain: Interval,
    h: Interval,
    degree: usize,
    coeffs: Vec<Interval>,
    order: usize,
    rem: Interval,
}

fn is_zero(i: &Interval) -> bool {
    i.lo == 0.0 && i.hi == 0.0
}

fn zero() -> Interval {
    Interval::point(0.0)
}

fn one() -> Interval {
    Interval::point(1.0)
}

/// Interval enclosures of `1/i!` for `i ≤ n`.
fn inv_factorials(n: usize) -> Vec<Interval> {
    let mut out = vec![one()];
    for i in 1..=n {
        let prev = out[i - 1];
        out.push(prev.div(&Interval::point(i as f64)).expect("nonzero"));
    }
    out
}

#[derive(Clone, Copy, Debug)]
enum Elementary {
    Exp,
    Sin,
    Cos,
    Ln,
    Recip,
    Sqrt,
}

impl Elementary {
    /// `g^(i)(y) / i!` for `i = 0..=n`, enclosed over `y`.
    fn series(self, y: &Interval, n: usize) -> Result<Vec<Interval>, TaylorError> {
        let inv = inv_factorials(n);
        let mut out = Vec::with_capacity(n + 1);
        for (i, f) in inv.iter().enumerate() {
            out.push(self.derivative(y, i)?.mul(f));
        }
        Ok(out)
    }

    /// `g^(i)(y)` enclosed over `y`.
    fn derivative(self, y: &Interval, i: usize) -> Result<Interval, TaylorError> {
        let sign = |odd: bool| if odd { -1.0 } else { 1.0 };
        Ok(match self {
            Elementary::Exp => y.exp(),
            Elementary::Sin => match i % 4 {
                0 => y.sin(),
                1 => y.cos(),
                2 => y.sin().neg(),
                _ => y.cos().neg(),
            },
            Elementary::Cos => match i % 4 {
                0 => y.cos(),
                1 => y.sin().neg(),
                2 => y.cos().neg(),
                _ => y.sin(),
            },
            Elementary::Ln => {
                if y.lo <= 0.0 {
                    return Err(TaylorError::DomainViolation("ln near a nonpositive value".into()));
                }
                if i == 0 {
                    y.ln().expect("positive")
                } else {
                    // (−1)^(i+1) (i−1)! / y^i
                    let fact = inv_factorials(i - 1)[i - 1];
                    let num = Interval::point(sign(i.is_multiple_of(2))).div(&fact).expect("nonzero");
                    num.div(&y.powi(i as u32)).map_err(|_| TaylorError::DenominatorMayVanish)?
                }
            }
            Elementary::Recip => {
                if y.contains_zero() {
                    return Err(TaylorError::DenominatorMayVanish);
                }
                // (−1)^i i! / y^(i+1)
                let fact = inv_factorials(i)[i];
                let num = Interval::point(sign(i % 2 == 1)).div(&fact).expect("nonzero");
                num.div(&y.powi(i as u32 + 1)).map_err(|_| TaylorError::DenominatorMayVanish)?
            }
            Elementary::Sqrt => {
                if y.lo <= 0.0 {
                    return Err(TaylorError::DomainViolation("sqrt near a nonpositive value".into()));
                }
                // (1/2)(1/2 − 1)…(1/2 − i + 1) · y^(1/2 − i)
                let mut falling = Q::one();
                for j in 0..i {
                    falling *= Q::new(BigInt::from(1), BigInt::from(2)) - Q::from_integer(BigInt::from(j));
                }
                let s = y.sqrt().expect("positive");
                const_interval(&falling)
                    .mul(&s)
                    .div(&y.powi(i as u32))
                    .map_err(|_| TaylorError::DenominatorMayVanish)?
            }
        })
    }
}

struct Ctx {
    center: Q,
    c: Interval,
    h: Interval,
    domain: Interval,
    degree: usize,
}

impl TaylorModel {
    fn constant(ctx: &Ctx, v: Interval) -> TaylorModel {
        TaylorModel {
            center: ctx.center.clone(),
            domain: ctx.domain,
            h: ctx.h,
            degree: ctx.degree,
            coeffs: vec![v],
            order: ctx.degree + 1,
            rem: zero(),
        }
    }

    fn identity(ctx: &Ctx) -> TaylorModel {
        let mut t = TaylorModel::constant(ctx, ctx.c);
        if ctx.degree >= 1 {
            t.coeffs.push(one());
        } else {
            t.order = 1;
            t.rem = one();
        }
        t
    }

    fn like(&self, coeffs: Vec<Interval>, order: usize, rem: Interval) -> TaylorModel {
        TaylorModel {
            center: self.center.clone(),
            domain: self.domain,
            h: self.h,
            degree: self.degree,
            coeffs,
            order,
            rem,
        }
    }

    pub fn center(&self) -> &Q {
        &self.center
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[Interval] {
        &self.coeffs
    }

    /// The remainder as `(k, R)` with `f − P ∈ h^k · R`.
    pub fn remainder_factored(&self) -> (usize, Interval) {
        (self.order, self.rem)
    }

    /// Absolute remainder bound over the domain.
    pub fn remainder(&self) -> Interval {
        self.h.powi(self.order as u32).mul(&self.rem)
    }

    fn poly_at(coeffs: &[Interval], h: &Interval) -> Interval {
        coeffs.iter().rev().fold(zero(), |acc, c| acc.mul(h).add(c))
    }

    /// Enclosure of the modelled function over the whole domain.
    pub fn bound(&self) -> Interval {
        Self::poly_at(&self.coeffs, &self.h).add(&self.remainder())
    }

    /// Enclosure of the modelled function at a single point of the domain.
    pub fn enclose_at(&self, x: f64) -> Interval {
        let h = Interval::point(x).sub(&const_interval(&self.center));
        Self::poly_at(&self.coeffs, &h).add(&h.powi(self.order as u32).mul(&self.rem))
    }

    /// Remainder re-expressed at a lower order `k ≤ self.order`.
    fn rem_at(&self, k: usize) -> Interval {
        self.h.powi((self.order - k) as u32).mul(&self.rem)
    }

    fn add(&self, other: &TaylorModel) -> TaylorModel {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or_else(zero);
                let b = other.coeffs.get(i).copied().unwrap_or_else(zero);
                a.add(&b)
            })
            .collect();
        let k = self.order.min(other.order);
        self.like(coeffs, k, self.rem_at(k).add(&other.rem_at(k)))
    }

    fn neg(&self) -> TaylorModel {
        self.like(self.coeffs.iter().map(|c| c.neg()).collect(), self.order, self.rem.neg())
    }

    fn mul(&self, other: &TaylorModel) -> TaylorModel {
        let n = self.degree;
        let mut full = vec![zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                full[i + j] = full[i + j].add(&a.mul(b));
            }
        }
        let high = if full.len() > n + 1 { full.split_off(n + 1) } else { Vec::new() };
        let k = (n + 1).min(self.order).min(other.order);
        let mut rem = zero();
        if !high.is_empty() {
            // Σ_{l>n} c_l h^l = h^(n+1) · Σ c_l h^(l−n−1)
            rem = Self::poly_at(&high, &self.h).mul(&self.h.powi((n + 1 - k) as u32));
        }
        let pa = Self::poly_at(&self.coeffs, &self.h);
        let pb = Self::poly_at(&other.coeffs, &self.h);
        rem = rem.add(&pa.mul(&other.rem_at(k)));
        rem = rem.add(&pb.mul(&self.rem_at(k)));
        let both = self.order + other.order;
        let rr = self.rem.mul(&other.rem).mul(&self.h.powi((both - k) as u32));
        rem = rem.add(&rr);
        self.like(full, k, rem)
    }

    fn powi(&self, n: u64) -> TaylorModel {
        let mut base = self.clone();
        let mut acc: Option<TaylorModel> = None;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc.unwrap_or_else(|| self.like(vec![one()], self.degree + 1, zero()))
    }

    /// Lowest power of `h` that certainly divides the model.
    pub(crate) fn valuation(&self) -> usize {
        let first = self.coeffs.iter().position(|c| !is_zero(c)).unwrap_or(self.coeffs.len());
        first.min(self.order)
    }

    /// Divides the model by `h^m`; requires `m ≤ valuation()`.
    pub(crate) fn shift_down(&self, m: usize) -> TaylorModel {
        debug_assert!(m <= self.valuation());
        let mut coeffs: Vec<Interval> = self.coeffs.iter().skip(m).copied().collect();
        if coeffs.is_empty() {
            coeffs.push(zero());
        }
        self.like(coeffs, self.order - m, self.rem)
    }

    fn compose(&self, g: Elementary) -> Result<TaylorModel, TaylorError> {
        let n = self.degree;
        let a0 = self.coeffs[0];
        if !a0.is_bounded() || !self.bound().is_bounded() {
            return Err(TaylorError::UnsupportedNode("unbounded inner model".into()));
        }
        let m = a0.mid();
        let mi = Interval::point(m);
        let mut t = self.clone();
        t.coeffs[0] = a0.sub(&mi);
        let b = t.bound();
        let y = mi.add(&b).hull(&mi);
        // the Lagrange form needs g analytic on all of m + B
        if let Elementary::Ln | Elementary::Sqrt = g {
            if y.lo <= 0.0 {
                return Err(TaylorError::DomainViolation("argument may reach zero".into()));
            }
        }
        if let Elementary::Recip = g {
            if y.contains_zero() {
                return Err(TaylorError::DenominatorMayVanish);
            }
        }
        let big_n = n + 1;
        let c = g.series(&mi, big_n)?;
        let ctx_const = |v: Interval| self.like(vec![v], n + 1, zero());
        let mut acc = ctx_const(c[big_n]);
        for i in (0..big_n).rev() {
            acc = acc.mul(&t).add(&ctx_const(c[i]));
        }
        // g^(N+1)(ξ)/(N+1)! · t^(N+1) with t = h^j · q
        let j = t.valuation();
        let q = if j == 0 { b } else { t.shift_down(j).bound() };
        let lag = g.derivative(&y, big_n + 1)?.mul(&inv_factorials(big_n + 1)[big_n + 1]);
        let power = j * (big_n + 1);
        let k = (n + 1).min(power);
        let lag_rem = lag.mul(&q.powi(big_n as u32 + 1)).mul(&self.h.powi((power - k) as u32));
        Ok(acc.add(&self.like(vec![zero()], k, lag_rem)))
    }

    fn reciprocal(&self) -> Result<TaylorModel, TaylorError> {
        self.compose(Elementary::Recip)
    }

    fn trimmed(mut self) -> TaylorModel {
        while self.coeffs.len() > 1 && is_zero(self.coeffs.last().unwrap()) {
            self.coeffs.pop();
        }
        self
    }
}

fn build(e: &Expr, ctx: &Ctx) -> Result<TaylorModel, TaylorError> {
    Ok(match e {
        Expr::X => TaylorModel::identity(ctx),
        Expr::Const(q) => TaylorModel::constant(ctx, const_interval(q)),
        Expr::Neg(a) => build(a, ctx)?.neg(),
        Expr::Add(a, b) => build(a, ctx)?.add(&build(b, ctx)?),
        Expr::Sub(a, b) => build(a, ctx)?.add(&build(b, ctx)?.neg()),
        Expr::Mul(a, b) => build(a, ctx)?.mul(&build(b, ctx)?),
        Expr::Div(a, b) => build(a, ctx)?.mul(&build(b, ctx)?.reciprocal()?),
        Expr::Pow(a, n) => {
            let p = build(a, ctx)?.powi(n.unsigned_abs());
            if *n < 0 {
                p.reciprocal()?
            } else {
                p
            }
        }
        Expr::Sin(a) => build(a, ctx)?.compose(Elementary::Sin)?,
        Expr::Cos(a) => build(a, ctx)?.compose(Elementary::Cos)?,
        Expr::Exp(a) => build(a, ctx)?.compose(Elementary::Exp)?,
        Expr::Ln(a) => build(a, ctx)?.compose(Elementary::Ln)?,
        Expr::Sqrt(a) => build(a, ctx)?.compose(Elementary::Sqrt)?,
        Expr::Abs(a) => {
            let t = build(a, ctx)?;
            let b = t.bound();
            if b.lo > 0.0 {
                t
            } else if b.hi < 0.0 {
                t.neg()
            } else {
                return Err(TaylorError::UnsupportedNode(format!("abs({a}) may change sign")));
            }
        }
    })
}

/// Taylor model of `e` of the given degree, expanded at `point`, valid on
/// `domain` (which must contain `point`).
pub fn taylor_model(e: &Expr, point: &Q, degree: usize, domain: Interval) -> Result<TaylorModel, TaylorError> {
    let inside = |v: f64| Q::from_float(v);
    let lo_ok = domain.lo == f64::NEG_INFINITY || inside(domain.lo).is_some_and(|l| &l <= point);
    let hi_ok = domain.hi == f64::INFINITY || inside(domain.hi).is_some_and(|h| point <= &h);
    if !(lo_ok && hi_ok) || !domain.is_bounded() {
        return Err(TaylorError::PointOutsideDomain);
    }
    let c = const_interval(point);
    let ctx = Ctx { center: point.clone(), c, h: domain.sub(&c), domain, degree };
    let tm = build(e, &ctx)?;
    if !tm.bound().is_bounded() {
        return Err(TaylorError::UnsupportedNode("unbounded model".into()));
    }
    Ok(tm.trimmed())
}

/// Taylor models of `num` and `den` at `point`, with the common power of
/// `h` divided out; the result models `num / den` including at `point`.
pub(crate) fn quotient_model(
    num: &Expr,
    den: &Expr,
    point: &Q,
    degree: usize,
    domain: Interval,
) -> Result<TaylorModel, TaylorError> {
    let u = taylor_model(num, point, degree, domain)?;
    let w = taylor_model(den, point, degree, domain)?;
    let m = w.valuation();
    if m > u.valuation() {
        return Err(TaylorError::DenominatorMayVanish);
    }
    let (u, w) = (u.shift_down(m), w.shift_down(m));
    let r = u.mul(&w.reciprocal()?);
    if !r.bound().is_bounded() {
        return Err(TaylorError::DenominatorMayVanish);
    }
    Ok(r.trimmed())
}
