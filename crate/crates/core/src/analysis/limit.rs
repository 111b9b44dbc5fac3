//! Limit certification.
//!
//! Rules are tried in order: a squeeze against a bounded trigonometric
//! factor, Taylor-model continuity or quotient enclosures, an oscillation
//! witness for `sin(c/x)` / `cos(c/x)`, and finally dyadic probing, which
//! only yields an estimate. Limits at infinity are moved to `0±` by `x = 1/t`
//! and limits at a nonzero point by translation.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value as Json};

use super::enclose::{const_interval, eval_interval};
use super::expr::Expr;
use super::taylor::{quotient_model, taylor_model, TaylorModel};
use crate::numeric::{format_rational, parse_rational, Interval};

type Q = BigRational;

const TM_DEGREE: usize = 8;
const MAX_HALVINGS: usize = 60;
const TARGET_WIDTH: f64 = 1e-6;
const MAX_DENOMINATOR: i64 = 100;
const PROBE_KS: std::ops::RangeInclusive<u32> = 10..=40;
const PROBE_AGREEMENT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Both,
    Right,
    Left,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LimitPoint {
    Finite(Q, Side),
    PosInf,
    NegInf,
}

impl FromStr for LimitPoint {
    type Err = String;
    /// `0`, `0+`, `1/2-`, `inf`, `+inf`, `-inf`.
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        match s {
            "inf" | "+inf" | "∞" | "+∞" => return Ok(LimitPoint::PosInf),
            "-inf" | "-∞" => return Ok(LimitPoint::NegInf),
            _ => {}
        }
        let (body, side) = if let Some(b) = s.strip_suffix('+') {
            (b, Side::Right)
        } else if let Some(b) = s.strip_suffix('-') {
            (b, Side::Left)
        } else {
            (s, Side::Both)
        };
        parse_rational(body).map(|q| LimitPoint::Finite(q, side)).ok_or_else(|| format!("invalid limit point `{s}`"))
    }
}

impl fmt::Display for LimitPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitPoint::PosInf => write!(f, "+inf"),
            LimitPoint::NegInf => write!(f, "-inf"),
            LimitPoint::Finite(q, side) => {
                let suffix = match side {
                    Side::Both => "",
                    Side::Right => "+",
                    Side::Left => "-",
                };
                write!(f, "{}{suffix}", format_rational(q))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LimitValue {
    /// The enclosure collapsed to this rational.
    Exact(Q),
    /// The unique rational of small denominator inside the enclosure.
    Snapped(Q, Interval),
    Enclosure(Interval),
}

impl LimitValue {
    pub fn approx(&self) -> f64 {
        match self {
            LimitValue::Exact(q) | LimitValue::Snapped(q, _) => q.to_f64().unwrap_or(f64::NAN),
            LimitValue::Enclosure(i) => i.mid(),
        }
    }

    pub fn enclosure(&self) -> Interval {
        match self {
            LimitValue::Exact(q) => const_interval(q),
            LimitValue::Snapped(_, i) | LimitValue::Enclosure(i) => *i,
        }
    }
}

impl fmt::Display for LimitValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitValue::Exact(q) | LimitValue::Snapped(q, _) => write!(f, "{}", format_rational(q)),
            LimitValue::Enclosure(i) => write!(f, "∈ {i}"),
        }
    }
}

/// A point together with a rigorous enclosure of the function there.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub x: f64,
    pub value: Interval,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LimitVerdict {
    Certified { value: LimitValue, rule: String, certificate: Vec<String> },
    NoLimitCertified { reason: String, witnesses: Vec<Witness> },
    NumericEstimate { value: f64, probes: Vec<(f64, f64)> },
    Undefined { reason: String },
    Inconclusive { reason: String, probes: Vec<(f64, Option<f64>)> },
}

impl LimitVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            LimitVerdict::Certified { .. } => "Certified",
            LimitVerdict::NoLimitCertified { .. } => "NoLimitCertified",
            LimitVerdict::NumericEstimate { .. } => "NumericEstimate",
            LimitVerdict::Undefined { .. } => "Undefined",
            LimitVerdict::Inconclusive { .. } => "Inconclusive",
        }
    }

    pub fn to_json(&self) -> Json {
        let iv = |i: &Interval| json!([i.lo, i.hi]);
        match self {
            LimitVerdict::Certified { value, rule, certificate } => json!({
                "kind": self.name(),
                "value": value.to_string(),
                "approx": value.approx(),
                "enclosure": iv(&value.enclosure()),
                "rule": rule,
                "certificate": certificate,
            }),
            LimitVerdict::NoLimitCertified { reason, witnesses } => json!({
                "kind": self.name(),
                "reason": reason,
                "witnesses": witnesses.iter().map(|w| json!({"x": w.x, "value": iv(&w.value)})).collect::<Vec<_>>(),
            }),
            LimitVerdict::NumericEstimate { value, probes } => json!({
                "kind": self.name(),
                "value": value,
                "probes": probes.iter().map(|(x, y)| json!([x, y])).collect::<Vec<_>>(),
            }),
            LimitVerdict::Undefined { reason } => json!({"kind": self.name(), "reason": reason}),
            LimitVerdict::Inconclusive { reason, probes } => json!({
                "kind": self.name(),
                "reason": reason,
                "probes": probes.iter().map(|(x, y)| json!([x, y])).collect::<Vec<_>>(),
            }),
        }
    }
}

impl fmt::Display for LimitVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitVerdict::Certified { value, rule, .. } => write!(f, "Certified: {value} ({rule})"),
            LimitVerdict::NoLimitCertified { reason, witnesses } => {
                write!(f, "NoLimitCertified: {reason}")?;
                for w in witnesses.iter().take(2) {
                    write!(f, "; f({:e}) ∈ [{:.4}, {:.4}]", w.x, w.value.lo, w.value.hi)?;
                }
                Ok(())
            }
            LimitVerdict::NumericEstimate { value, .. } => {
                write!(f, "NumericEstimate: {value:.6} (probes agree to {PROBE_AGREEMENT:e}, not certified)")
            }
            LimitVerdict::Undefined { reason } => write!(f, "Undefined: {reason}"),
            LimitVerdict::Inconclusive { reason, .. } => write!(f, "Inconclusive: {reason}"),
        }
    }
}

/// Problem after reduction to a limit at `0` from the given side.
struct Reduced<'a> {
    original: &'a Expr,
    expr: Expr,
    side: Side,
    /// Maps the reduced variable back to the original one.
    back: Box<dyn Fn(f64) -> f64 + 'a>,
    note: Option<String>,
}

fn reduce<'a>(e: &'a Expr, point: &LimitPoint) -> Reduced<'a> {
    let recip_t = Expr::div(Expr::int(1), Expr::X);
    match point {
        LimitPoint::PosInf => Reduced {
            original: e,
            expr: e.substitute(&recip_t),
            side: Side::Right,
            back: Box::new(|t| 1.0 / t),
            note: Some("substituted x = 1/t, t → 0+".into()),
        },
        LimitPoint::NegInf => Reduced {
            original: e,
            expr: e.substitute(&recip_t),
            side: Side::Left,
            back: Box::new(|t| 1.0 / t),
            note: Some("substituted x = 1/t, t → 0-".into()),
        },
        LimitPoint::Finite(a, side) if a.is_zero() => {
            Reduced { original: e, expr: e.clone(), side: *side, back: Box::new(|t| t), note: None }
        }
        LimitPoint::Finite(a, side) => {
            let af = a.to_f64().unwrap_or(0.0);
            Reduced {
                original: e,
                expr: e.substitute(&Expr::add(Expr::X, Expr::Const(a.clone()))),
                side: *side,
                back: Box::new(move |t| t + af),
                note: Some(format!("substituted x = t + {}", format_rational(a))),
            }
        }
    }
}

fn domain(side: Side, delta: f64) -> Interval {
    match side {
        Side::Both => Interval::new(-delta, delta),
        Side::Right => Interval::new(0.0, delta),
        Side::Left => Interval::new(-delta, 0.0),
    }
}

/// Value of the model at its center, which is `0`.
fn value_at_center(tm: &TaylorModel) -> Interval {
    let (order, rem) = tm.remainder_factored();
    let a0 = tm.coefficients()[0];
    if order >= 1 {
        a0
    } else {
        a0.add(&rem)
    }
}

/// Splits `e` into numerator and denominator when it has a quotient shape.
fn as_quotient(e: &Expr) -> Option<(Expr, Expr)> {
    let one = Expr::int(1);
    match e {
        Expr::Div(a, b) => Some(((**a).clone(), (**b).clone())),
        Expr::Pow(a, n) if *n < 0 => Some((one, Expr::pow((**a).clone(), -n))),
        Expr::Mul(a, b) => match (&**a, &**b) {
            (Expr::Div(n, d), other) | (other, Expr::Div(n, d)) => {
                let num = if **n == one { other.clone() } else { Expr::mul((**n).clone(), other.clone()) };
                Some((num, (**d).clone()))
            }
            _ => None,
        },
        Expr::Neg(a) => as_quotient(a).map(|(n, d)| (Expr::neg(n), d)),
        _ => None,
    }
}

enum ModelKind {
    Continuity,
    Quotient,
}

fn model(e: &Expr, side: Side, delta: f64) -> Option<(TaylorModel, ModelKind)> {
    let dom = domain(side, delta);
    if let Ok(tm) = taylor_model(e, &Q::zero(), TM_DEGREE, dom) {
        return Some((tm, ModelKind::Continuity));
    }
    let (n, d) = as_quotient(e)?;
    quotient_model(&n, &d, &Q::zero(), TM_DEGREE, dom).ok().map(|tm| (tm, ModelKind::Quotient))
}

/// True when `e → 0` is proved exactly at `0` from `side`.
fn vanishes(e: &Expr, side: Side) -> Option<String> {
    if let Some(LimitVerdict::Certified { value: LimitValue::Exact(q), rule, .. }) = squeeze(e, side) {
        if q.is_zero() {
            return Some(rule);
        }
    }
    let mut delta = 0.5;
    for _ in 0..MAX_HALVINGS {
        if let Some((tm, kind)) = model(e, side, delta) {
            if tm.valuation() >= 1 {
                return Some(match kind {
                    ModelKind::Continuity => format!("{e} is continuous and vanishes at 0"),
                    ModelKind::Quotient => format!("Taylor quotient of {e} vanishes at 0"),
                });
            }
            return None;
        }
        delta /= 2.0;
    }
    None
}

fn bounded_factor(e: &Expr) -> Option<&'static str> {
    match e {
        Expr::Sin(_) => Some("|sin|≤1"),
        Expr::Cos(_) => Some("|cos|≤1"),
        _ => None,
    }
}

/// `u · v` with `|v| ≤ 1` and `u → 0`.
fn squeeze(e: &Expr, side: Side) -> Option<LimitVerdict> {
    let Expr::Mul(a, b) = e else { return None };
    for (u, v) in [(&**a, &**b), (&**b, &**a)] {
        if let Some(bound) = bounded_factor(v) {
            if let Some(why) = vanishes(u, side) {
                return Some(LimitVerdict::Certified {
                    value: LimitValue::Exact(Q::zero()),
                    rule: format!("squeeze: {bound}"),
                    certificate: vec![format!("|{e}| ≤ |{u}|"), why],
                });
            }
        }
    }
    None
}

/// The unique `n/d` with `d ≤ 100` inside `iv`, if any.
fn snap(iv: &Interval) -> Option<Q> {
    let mut found: Option<Q> = None;
    for d in 1..=MAX_DENOMINATOR {
        let n = (iv.mid() * d as f64).round();
        if !n.is_finite() {
            return None;
        }
        let q = Q::new(BigInt::from(n as i64), BigInt::from(d));
        let qi = const_interval(&q);
        if iv.lo <= qi.lo && qi.hi <= iv.hi {
            match &found {
                Some(f) if *f != q => return None,
                _ => found = Some(q),
            }
        }
    }
    found
}

fn taylor_rule(e: &Expr, side: Side) -> Option<LimitVerdict> {
    let mut delta = 0.5;
    let mut best: Option<(Interval, ModelKind, f64)> = None;
    for _ in 0..MAX_HALVINGS {
        if let Some((tm, kind)) = model(e, side, delta) {
            let v = value_at_center(&tm);
            let enclosure = v.intersect(&tm.bound()).unwrap_or(v);
            let done = enclosure.width() < TARGET_WIDTH;
            best = Some((enclosure, kind, delta));
            if done {
                break;
            }
        } else if best.is_some() {
            break;
        }
        delta /= 2.0;
    }
    let (enclosure, kind, delta) = best?;
    if enclosure.width().is_nan() || enclosure.width() >= TARGET_WIDTH {
        return None;
    }
    let rule = match kind {
        ModelKind::Continuity => "Taylor model: continuous at 0",
        ModelKind::Quotient => "Taylor quotient",
    };
    let value = if enclosure.lo == enclosure.hi {
        match Q::from_float(enclosure.lo) {
            Some(q) => LimitValue::Exact(q),
            None => LimitValue::Enclosure(enclosure),
        }
    } else {
        match snap(&enclosure) {
            Some(q) => LimitValue::Snapped(q, enclosure),
            None => LimitValue::Enclosure(enclosure),
        }
    };
    Some(LimitVerdict::Certified {
        value,
        rule: rule.into(),
        certificate: vec![format!(
            "degree {TM_DEGREE} model on {} encloses the limit in {enclosure}",
            domain(side, delta)
        )],
    })
}

/// `sin(c/x)` or `cos(c/x)`: attains both `1` and `−1` in every
/// neighbourhood of `0`.
fn oscillation(r: &Reduced<'_>) -> Option<LimitVerdict> {
    let (inner, peak, trough) = match &r.expr {
        Expr::Sin(a) => (&**a, FRAC_PI_2, -FRAC_PI_2),
        Expr::Cos(a) => (&**a, 0.0, PI),
        _ => return None,
    };
    let c = match inner {
        Expr::Div(n, d) if **d == Expr::X => match &**n {
            Expr::Const(c) if !c.is_zero() => c.clone(),
            _ => return None,
        },
        _ => return None,
    };
    let cf = c.to_f64()?;
    // θ = c/x must carry the sign of x·c
    let sign = match r.side {
        Side::Left => -1.0,
        _ => 1.0,
    } * cf.signum();
    let mut witnesses = Vec::new();
    for k in [10.0, 1000.0, 100000.0] {
        for phase in [peak, trough] {
            let theta = sign * (TAU * k) + phase;
            let t = cf / theta;
            let x = (r.back)(t);
            let value = eval_interval(r.original, Interval::point(x)).ok()?;
            witnesses.push(Witness { x, value });
        }
    }
    let high = witnesses.iter().step_by(2).all(|w| w.value.lo >= 0.9);
    let low = witnesses.iter().skip(1).step_by(2).all(|w| w.value.hi <= -0.9);
    (high && low).then(|| LimitVerdict::NoLimitCertified {
        reason: format!("{} oscillates between -1 and 1", r.expr),
        witnesses,
    })
}

fn probe_side(r: &Reduced<'_>, sign: f64) -> Vec<(f64, Option<f64>)> {
    PROBE_KS
        .map(|k| {
            let t = sign * 2f64.powi(-(k as i32));
            let x = (r.back)(t);
            (x, r.original.eval(x))
        })
        .collect()
}

/// Estimate from one side: the last five probes must agree; the value is
/// a Richardson step on the last two.
fn side_estimate(probes: &[(f64, Option<f64>)]) -> Option<f64> {
    let tail: Vec<f64> = probes[probes.len() - 5..].iter().map(|p| p.1).collect::<Option<_>>()?;
    let (lo, hi) = tail.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
    if hi - lo > PROBE_AGREEMENT {
        return None;
    }
    let (a, b) = (tail[3], tail[4]);
    let r = 2.0 * b - a;
    Some(if (r - b).abs() <= PROBE_AGREEMENT { r } else { b })
}

fn probing(r: &Reduced<'_>) -> LimitVerdict {
    let signs: &[f64] = match r.side {
        Side::Both => &[1.0, -1.0],
        Side::Right => &[1.0],
        Side::Left => &[-1.0],
    };
    let sides: Vec<Vec<(f64, Option<f64>)>> = signs.iter().map(|s| probe_side(r, *s)).collect();
    let all: Vec<(f64, Option<f64>)> = sides.iter().flatten().copied().collect();
    if all.iter().all(|p| p.1.is_none()) {
        return LimitVerdict::Undefined { reason: format!("{} is undefined at every probe", r.original) };
    }
    let estimates: Option<Vec<f64>> = sides.iter().map(|s| side_estimate(s)).collect();
    match estimates {
        Some(es) if es.iter().all(|e| (e - es[0]).abs() <= PROBE_AGREEMENT) => LimitVerdict::NumericEstimate {
            value: es[0],
            probes: all.iter().filter_map(|(x, y)| y.map(|y| (*x, y))).collect(),
        },
        Some(_) => LimitVerdict::Inconclusive { reason: "one-sided probes disagree".into(), probes: all },
        None => LimitVerdict::Inconclusive { reason: "probes do not settle".into(), probes: all },
    }
}

/// Certifies, disproves or estimates `lim e(x)` at `point`.
pub fn certify_limit(e: &Expr, point: &LimitPoint) -> LimitVerdict {
    let r = reduce(e, point);
    let with_note = |v: LimitVerdict| match (v, &r.note) {
        (LimitVerdict::Certified { value, rule, mut certificate }, Some(note)) => {
            certificate.insert(0, note.clone());
            LimitVerdict::Certified { value, rule, certificate }
        }
        (v, _) => v,
    };
    if let Some(v) = squeeze(&r.expr, r.side) {
        return with_note(v);
    }
    if let Some(v) = taylor_rule(&r.expr, r.side) {
        return with_note(v);
    }
    if let Some(v) = oscillation(&r) {
        return v;
    }
    probing(&r)
}

/// Probes used as an independent check of certified values.
pub fn probe_values(e: &Expr, point: &LimitPoint) -> Vec<(f64, Option<f64>)> {
    let r = reduce(e, point);
    let signs: &[f64] = match r.side {
        Side::Both => &[1.0, -1.0],
        Side::Right => &[1.0],
        Side::Left => &[-1.0],
    };
    signs.iter().flat_map(|s| probe_side(&r, *s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::parse_expr;

    fn lim(e: &str, at: &str) -> LimitVerdict {
        certify_limit(&parse_expr(e).unwrap(), &at.parse().unwrap())
    }

    #[test]
    fn squeeze_rule() {
        assert_eq!(lim("x*sin(1/x)", "0").to_string(), "Certified: 0 (squeeze: |sin|≤1)");
        assert_eq!(lim("x^2*cos(1/x)", "0-").to_string(), "Certified: 0 (squeeze: |cos|≤1)");
    }

    #[test]
    fn quotients() {
        assert_eq!(lim("sin(x)/x", "0").to_string(), "Certified: 1 (Taylor quotient)");
        assert_eq!(lim("(1 - cos(x))/x^2", "0").to_string(), "Certified: 0.5 (Taylor quotient)");
        assert!(matches!(lim("cos(x)", "0"), LimitVerdict::Certified { .. }));
    }

    #[test]
    fn oscillation_and_estimates() {
        assert!(matches!(lim("sin(1/x)", "0+"), LimitVerdict::NoLimitCertified { .. }));
        assert!(matches!(lim("sin(x)", "inf"), LimitVerdict::NoLimitCertified { .. }));
        match lim("(1 + 1/x)^x", "inf") {
            LimitVerdict::NumericEstimate { value, .. } => assert!((value - std::f64::consts::E).abs() < 1e-3),
            v => panic!("{v}"),
        }
        assert!(matches!(lim("ln(x)", "0-"), LimitVerdict::Undefined { .. }));
    }

    #[test]
    fn points_parse() {
        assert_eq!("1/2-".parse::<LimitPoint>().unwrap(), LimitPoint::Finite(Q::new(1.into(), 2.into()), Side::Left));
        assert_eq!("-inf".parse::<LimitPoint>().unwrap(), LimitPoint::NegInf);
        assert_eq!("-1".parse::<LimitPoint>().unwrap(), LimitPoint::Finite(Q::from_integer((-1).into()), Side::Both));
    }
}
