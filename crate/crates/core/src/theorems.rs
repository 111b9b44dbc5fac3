//! The rhombus lemma and Tzitzeica's three-circle theorem, checked on
//! construction programs.
//!
//! Three congruent circles through a common point `O` meet pairwise in
//! three further points; the circle through those is congruent to the
//! originals. With `O` at the origin the second intersection of the circles
//! about `X` and `Y` is `X + Y`, so the whole configuration is rational
//! whenever the centers are.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed};
use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::construct::{
    evaluate, Branch, ConstructionProgram, Ctor, EvalTrace, ObjError, ParseError, Step, TraceScalar, Value,
};
use crate::geom::{circle_circle_intersections, dist_sq, is_rhombus, Circle, Point};
use crate::numeric::{round_display, ExactScalar, Scalar, ScalarMode};

type Q = BigRational;

pub const DEFAULT_TOLERANCE: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TheoremError {
    #[error("circles are not congruent")]
    NotCongruent,
    #[error("circles do not meet in two points")]
    NotIntersecting,
    #[error("program does not have the three-circle shape: {0}")]
    ShapeMismatch(String),
    #[error("degenerate configuration: {0}")]
    DegenerateConfig(String),
    #[error("numeric failure: {0}")]
    Numeric(ObjError),
}

impl From<ObjError> for TheoremError {
    fn from(e: ObjError) -> Self {
        TheoremError::Numeric(e)
    }
}

impl From<crate::numeric::NumericError> for TheoremError {
    fn from(e: crate::numeric::NumericError) -> Self {
        TheoremError::Numeric(e.into())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    VerifiedExact,
    VerifiedWithin { tolerance: f64, max_residual: f64 },
    Falsified { residual: f64 },
    Degenerate { reason: ObjError },
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::VerifiedExact => "VerifiedExact",
            Outcome::VerifiedWithin { .. } => "VerifiedWithin",
            Outcome::Falsified { .. } => "Falsified",
            Outcome::Degenerate { .. } => "Degenerate",
        }
    }

    pub fn is_verified(&self) -> bool {
        matches!(self, Outcome::VerifiedExact | Outcome::VerifiedWithin { .. })
    }
}

/// One computed quantity backing a verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Evidence {
    pub label: String,
    /// Exact rendering, present in exact mode.
    pub exact: Option<String>,
    pub approx: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub outcome: Outcome,
    /// One-line statement of what was checked, e.g. `circum r² = 25 = r²`.
    pub summary: Option<String>,
    pub evidence: Vec<Evidence>,
}

impl Verdict {
    pub fn evidence(&self, label: &str) -> Option<&Evidence> {
        self.evidence.iter().find(|e| e.label == label)
    }

    /// `verdict/1` JSON.
    pub fn to_json(&self) -> Json {
        let mut outcome = json!({ "kind": self.outcome.name() });
        match &self.outcome {
            Outcome::VerifiedWithin { tolerance, max_residual } => {
                outcome["tolerance"] = json!(tolerance);
                outcome["max_residual"] = json!(max_residual);
            }
            Outcome::Falsified { residual } => outcome["residual"] = json!(residual),
            Outcome::Degenerate { reason } => outcome["reason"] = json!(reason.name()),
            Outcome::VerifiedExact => {}
        }
        let evidence: Vec<Json> =
            self.evidence.iter().map(|e| json!({ "label": e.label, "exact": e.exact, "approx": e.approx })).collect();
        json!({ "schema": "verdict/1", "outcome": outcome, "evidence": evidence })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.outcome {
            Outcome::VerifiedExact => f.write_str("VerifiedExact")?,
            Outcome::VerifiedWithin { tolerance, max_residual } => {
                write!(f, "VerifiedWithin {tolerance}: residual ≤ {}", round_up(*max_residual, 2))?
            }
            Outcome::Falsified { residual } => write!(f, "Falsified: residual {residual}")?,
            Outcome::Degenerate { reason } => write!(f, "Degenerate: {reason}")?,
        }
        if let Some(summary) = &self.summary {
            let sep = if matches!(self.outcome, Outcome::VerifiedExact) { ": " } else { "; " };
            write!(f, "{sep}{summary}")?;
        }
        for e in &self.evidence {
            let approx: Vec<String> = e.approx.iter().map(|x| format!("{x}")).collect();
            match &e.exact {
                Some(x) => write!(f, "\n  {} = {} ≈ ({})", e.label, x, approx.join(", "))?,
                None => write!(f, "\n  {} ≈ ({})", e.label, approx.join(", "))?,
            }
        }
        Ok(())
    }
}

/// Smallest value with `k` decimals that is at least `x`.
fn round_up(x: f64, k: i32) -> f64 {
    let s = 10f64.powi(k);
    (x * s - 1e-9).ceil().max(0.0) / s
}

/// Three congruent circles through `o`, centers placed by tan-half-angle
/// parameters on the circle of radius `√r_sq` about `o`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TzitzeicaConfig {
    pub o: (Q, Q),
    /// Must be the square of a rational so the centers stay rational.
    pub r_sq: Q,
    pub t_a: Q,
    pub t_b: Q,
    pub t_c: Q,
}

fn rational_sqrt(q: &Q) -> Option<Q> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Q::new(n, d))
}

impl TzitzeicaConfig {
    /// Centers `A`, `B`, `C`.
    pub fn centers(&self) -> Result<[(Q, Q); 3], TheoremError> {
        if !self.r_sq.is_positive() {
            return Err(TheoremError::DegenerateConfig("r_sq must be positive".into()));
        }
        let r = rational_sqrt(&self.r_sq)
            .ok_or_else(|| TheoremError::DegenerateConfig("r_sq must be the square of a rational".into()))?;
        let place = |t: &Q| {
            let one = Q::one();
            let t2 = t * t;
            let den = &one + &t2;
            (&self.o.0 + &r * (&one - &t2) / &den, &self.o.1 + &r * (t + t) / &den)
        };
        Ok([place(&self.t_a), place(&self.t_b), place(&self.t_c)])
    }
}

fn free_point(name: &str, p: &(Q, Q)) -> Step {
    Step { name: name.into(), ctor: Ctor::FreePoint(p.0.clone(), p.1.clone()) }
}

/// Program with circles `a`, `b`, `c` about `A`, `B`, `C` through `O`, their
/// further intersections `P = a∩b`, `N = a∩c`, `M = b∩c`, and the
/// circumcircle `m` of `M`, `N`, `P`.
pub fn tzitzeica_program(config: &TzitzeicaConfig) -> Result<ConstructionProgram, TheoremError> {
    let centers = config.centers()?;
    let o = &config.o;
    let names = ["A", "B", "C"];
    for i in 0..3 {
        for j in i + 1..3 {
            let (p, q) = (&centers[i], &centers[j]);
            if p == q {
                return Err(TheoremError::DegenerateConfig(format!("centers {} and {} coincide", names[i], names[j])));
            }
            if &p.0 + &q.0 == &o.0 + &o.0 && &p.1 + &q.1 == &o.1 + &o.1 {
                return Err(TheoremError::DegenerateConfig(format!(
                    "centers {} and {} are antipodal, circles are tangent at O",
                    names[i], names[j]
                )));
            }
        }
    }
    // O is left of X→Y exactly when it is the first intersection.
    let other_branch = |x: &(Q, Q), y: &(Q, Q)| {
        let cross = (&y.0 - &x.0) * (&o.1 - &x.1) - (&y.1 - &x.1) * (&o.0 - &x.0);
        if cross.is_positive() {
            Branch::Second
        } else {
            Branch::First
        }
    };
    let circle = |name: &str, center: &str| Step {
        name: name.into(),
        ctor: Ctor::CircleThrough { center: center.into(), through: "O".into() },
    };
    let meet = |name: &str, c1: &str, c2: &str, branch| Step {
        name: name.into(),
        ctor: Ctor::Intersect { c1: c1.into(), c2: c2.into(), branch },
    };
    let [a, b, c] = &centers;
    let steps = vec![
        free_point("O", o),
        free_point("A", a),
        free_point("B", b),
        free_point("C", c),
        circle("a", "A"),
        circle("b", "B"),
        circle("c", "C"),
        meet("P", "a", "b", other_branch(a, b)),
        meet("N", "a", "c", other_branch(a, c)),
        meet("M", "b", "c", other_branch(b, c)),
        Step { name: "m".into(), ctor: Ctor::Circumcircle("M".into(), "N".into(), "P".into()) },
    ];
    ConstructionProgram::from_steps(steps).map_err(|e: ParseError| TheoremError::ShapeMismatch(e.to_string()))
}

/// Step indices of a three-circle configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TzitzeicaShape {
    pub circles: [usize; 3],
    /// `intersections[k]` is the meeting point of the two circles other than `circles[k]`.
    pub intersections: [usize; 3],
    pub circumcircle: usize,
}

/// Finds the last circumcircle whose three points are intersections of the
/// three pairs from three center-defined circles.
pub fn tzitzeica_shape(program: &ConstructionProgram) -> Result<TzitzeicaShape, TheoremError> {
    let steps = program.steps();
    let idx = |n: &str| program.index_of(n).expect("validated reference");
    let center_defined = |i: usize| matches!(steps[i].ctor, Ctor::CircleRadius { .. } | Ctor::CircleThrough { .. });
    for (k, step) in steps.iter().enumerate().rev() {
        let Ctor::Circumcircle(x, y, z) = &step.ctor else { continue };
        let mut pairs = Vec::new();
        for p in [x, y, z] {
            match &steps[idx(p)].ctor {
                Ctor::Intersect { c1, c2, .. } => pairs.push((idx(p), idx(c1), idx(c2))),
                _ => break,
            }
        }
        if pairs.len() != 3 {
            continue;
        }
        let mut circles: Vec<usize> = pairs.iter().flat_map(|&(_, a, b)| [a, b]).collect();
        circles.sort_unstable();
        circles.dedup();
        if circles.len() != 3 || !circles.iter().all(|&c| center_defined(c)) {
            continue;
        }
        if pairs.iter().any(|&(_, a, b)| a == b) {
            continue;
        }
        let mut intersections = [0; 3];
        let mut seen = [false; 3];
        for &(p, a, b) in &pairs {
            let k = circles.iter().position(|&c| c != a && c != b).expect("three circles");
            if seen[k] {
                break;
            }
            seen[k] = true;
            intersections[k] = p;
        }
        if seen != [true; 3] {
            continue;
        }
        return Ok(TzitzeicaShape { circles: [circles[0], circles[1], circles[2]], intersections, circumcircle: k });
    }
    Err(TheoremError::ShapeMismatch(
        "no circumcircle of the three pairwise intersections of three center-defined circles".into(),
    ))
}

fn center_name(step: &Step) -> &str {
    match &step.ctor {
        Ctor::CircleRadius { center, .. } | Ctor::CircleThrough { center, .. } => center,
        _ => unreachable!("center-defined circle"),
    }
}

fn exact_evidence(label: &str, values: &[&ExactScalar]) -> Evidence {
    let parts: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    let exact = if parts.len() == 1 { parts[0].clone() } else { format!("({})", parts.join(", ")) };
    Evidence { label: label.into(), exact: Some(exact), approx: values.iter().map(|v| v.to_f64()).collect() }
}

pub fn check_tzitzeica(
    program: &ConstructionProgram,
    mode: ScalarMode,
    tolerance: f64,
) -> Result<Verdict, TheoremError> {
    tzitzeica_shape(program)?;
    let trace = evaluate(program, mode);
    check_tzitzeica_trace(program, &trace, tolerance)
}

/// Verdict on an already evaluated program.
///
/// The residual is the largest `|R² − r_i²|` over the three circles, so a
/// violated hypothesis (non-congruent circles) also shows up as a residual.
pub fn check_tzitzeica_trace(
    program: &ConstructionProgram,
    trace: &EvalTrace,
    tolerance: f64,
) -> Result<Verdict, TheoremError> {
    let shape = tzitzeica_shape(program)?;
    let needed = shape.circles.iter().chain(&shape.intersections).chain([&shape.circumcircle]);
    for &i in needed {
        if let Err(e) = &trace.objects[i].value {
            if e.is_limit() {
                return Err(TheoremError::Numeric(*e));
            }
            return Ok(Verdict { outcome: Outcome::Degenerate { reason: *e }, summary: None, evidence: vec![] });
        }
    }
    match trace.mode {
        ScalarMode::Exact => verdict_from::<ExactScalar>(trace, &shape, tolerance),
        _ => verdict_from::<f64>(trace, &shape, tolerance),
    }
}

fn verdict_from<S: TraceScalar>(
    trace: &EvalTrace,
    shape: &TzitzeicaShape,
    tolerance: f64,
) -> Result<Verdict, TheoremError> {
    let value = |i: usize| trace.objects[i].typed::<S>().expect("defined, mode-typed");
    let circle = |i: usize| value(i).as_circle().expect("circle step").clone();
    let point = |i: usize| value(i).as_point().expect("point step").clone();
    let exact = S::EXACT;
    let mut evidence = Vec::new();
    let mut ev = |label: String, vals: &[&S]| {
        evidence.push(if exact {
            let parts: Vec<String> = vals.iter().map(|v| display_scalar(*v)).collect();
            let text = if parts.len() == 1 { parts[0].clone() } else { format!("({})", parts.join(", ")) };
            Evidence { label, exact: Some(text), approx: vals.iter().map(|v| v.to_f64()).collect() }
        } else {
            Evidence { label, exact: None, approx: vals.iter().map(|v| v.to_f64()).collect() }
        });
    };
    for k in 0..3 {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        let pts = circle_circle_intersections(&circle(shape.circles[i]), &circle(shape.circles[j]))
            .map_err(|e| TheoremError::Numeric(e.into()))?;
        if pts.len() < 2 {
            return Ok(Verdict {
                outcome: Outcome::Degenerate { reason: ObjError::TangentCircles },
                summary: None,
                evidence: vec![],
            });
        }
    }
    let circum = circle(shape.circumcircle);
    let mut residuals = Vec::new();
    for &ci in &shape.circles {
        let c = circle(ci);
        ev(format!("{} r²", trace.objects[ci].name), &[&c.radius_sq]);
        residuals.push(circum.radius_sq.sub(&c.radius_sq)?);
    }
    for &pi in &shape.intersections {
        let p = point(pi);
        ev(trace.objects[pi].name.clone(), &[&p.x, &p.y]);
    }
    let cname = trace.objects[shape.circumcircle].name.clone();
    ev(format!("{cname} center"), &[&circum.center.x, &circum.center.y]);
    ev(format!("{cname} r²"), &[&circum.radius_sq]);
    let res_refs: Vec<&S> = residuals.iter().collect();
    ev("residuals".into(), &res_refs);
    let max_residual = residuals.iter().map(|r| r.to_f64().abs()).fold(0.0, f64::max);
    let outcome = if exact {
        let mut all_zero = true;
        for r in &residuals {
            all_zero &= r.is_zero()?;
        }
        if all_zero {
            Outcome::VerifiedExact
        } else {
            Outcome::Falsified { residual: max_residual }
        }
    } else if max_residual <= tolerance {
        Outcome::VerifiedWithin { tolerance, max_residual }
    } else {
        Outcome::Falsified { residual: max_residual }
    };
    let summary = match (&outcome, circum_text(&evidence, &cname)) {
        (Outcome::VerifiedExact, Some((circum_r2, r2))) if r2 == circum_r2 => {
            Some(format!("circum r² = {circum_r2} = r²"))
        }
        _ => None,
    };
    Ok(Verdict { outcome, summary, evidence })
}

/// Exact texts of the circumcircle's r² and of the first circle's r².
fn circum_text(evidence: &[Evidence], cname: &str) -> Option<(String, String)> {
    let circum = evidence.iter().find(|e| e.label == format!("{cname} r²"))?.exact.clone()?;
    let first = evidence.first()?.exact.clone()?;
    Some((circum, first))
}

/// Readable text for evidence; exact scalars print symbolically.
fn display_scalar<S: Scalar>(s: &S) -> String {
    let any: &dyn std::any::Any = s;
    match any.downcast_ref::<ExactScalar>() {
        Some(e) => e.to_string(),
        None => format!("{}", s.to_f64()),
    }
}

/// Rhombus lemma on two exact circles: centers and both intersections
/// have four equal sides.
pub fn check_rhombus_lemma(c1: &Circle<ExactScalar>, c2: &Circle<ExactScalar>) -> Result<Verdict, TheoremError> {
    if !c1.radius_sq.equals(&c2.radius_sq)? {
        return Err(TheoremError::NotCongruent);
    }
    let pts = circle_circle_intersections(c1, c2).map_err(|e| match e {
        crate::geom::GeomError::IdenticalCircles => TheoremError::DegenerateConfig("identical circles".into()),
        other => TheoremError::Numeric(ObjError::from(other)),
    })?;
    if pts.len() != 2 {
        return Err(TheoremError::NotIntersecting);
    }
    let (p, q) = (&pts[0], &pts[1]);
    let verts = [&c1.center, p, &c2.center, q];
    let mut evidence = Vec::new();
    for i in 0..4 {
        let d = dist_sq(verts[i], verts[(i + 1) % 4])?;
        let len = d.sqrt()?;
        evidence.push(exact_evidence(&format!("side{} length", i + 1), &[&len]));
        evidence.push(exact_evidence(&format!("side{}²", i + 1), &[&d]));
    }
    evidence.push(exact_evidence("p", &[&p.x, &p.y]));
    evidence.push(exact_evidence("q", &[&q.x, &q.y]));
    let outcome = if is_rhombus(&c1.center, p, &c2.center, q)? {
        Outcome::VerifiedExact
    } else {
        Outcome::Falsified { residual: 0.0 }
    };
    let summary = matches!(outcome, Outcome::VerifiedExact)
        .then(|| format!("all sides² = {}", evidence[1].exact.clone().unwrap_or_default()));
    Ok(Verdict { outcome, summary, evidence })
}

/// A side of the center triangle and the outer-triangle side that the
/// parallelogram argument makes equal to it.
#[derive(Debug, Clone, PartialEq)]
pub struct SidePair {
    pub center_side: [String; 2],
    pub outer_side: [String; 2],
    pub center_length: f64,
    pub outer_length: f64,
    pub difference: f64,
    /// Exact mode only.
    pub exact_difference: Option<ExactScalar>,
}

/// Matched side pairs. In display mode the lengths are rounded to `k`
/// decimals as a protocol would print them.
pub fn parallelogram_side_report(
    program: &ConstructionProgram,
    mode: ScalarMode,
) -> Result<Vec<SidePair>, TheoremError> {
    let shape = tzitzeica_shape(program)?;
    let trace = evaluate(program, mode);
    if let Some((name, e)) = trace.first_error() {
        return Err(TheoremError::ShapeMismatch(format!("{name} is undefined ({e})")));
    }
    let steps = program.steps();
    let centers: Vec<String> = shape.circles.iter().map(|&i| center_name(&steps[i]).to_string()).collect();
    let mut out = Vec::new();
    // centers i, j pair with the intersections of (i, k) and (j, k), which are
    // intersections[j] and intersections[i]
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let ci = &centers[i];
        let cj = &centers[j];
        let oi = &steps[shape.intersections[j]].name;
        let oj = &steps[shape.intersections[i]].name;
        let pair = match mode {
            ScalarMode::Exact => {
                let pt = |n: &str| -> Point<ExactScalar> {
                    trace
                        .get(n)
                        .and_then(|o| o.typed::<ExactScalar>())
                        .and_then(Value::as_point)
                        .expect("point")
                        .clone()
                };
                let a = dist_sq(&pt(ci), &pt(cj))?.sqrt()?;
                let b = dist_sq(&pt(oi), &pt(oj))?.sqrt()?;
                let d = a.sub(&b)?;
                SidePair {
                    center_side: [ci.clone(), cj.clone()],
                    outer_side: [oi.clone(), oj.clone()],
                    center_length: a.to_f64(),
                    outer_length: b.to_f64(),
                    difference: d.to_f64().abs(),
                    exact_difference: Some(d.abs()?),
                }
            }
            _ => {
                let pt = |n: &str| -> Point<f64> {
                    trace.get(n).and_then(|o| o.typed::<f64>()).and_then(Value::as_point).expect("point").clone()
                };
                let len = |p: &str, q: &str| -> Result<f64, TheoremError> {
                    let d = Scalar::sqrt(&dist_sq(&pt(p), &pt(q))?)?;
                    Ok(match mode {
                        ScalarMode::DisplayRounded(k) => round_display(d, k)?.to_f64(),
                        _ => d,
                    })
                };
                let a = len(ci, cj)?;
                let b = len(oi, oj)?;
                let diff = match mode {
                    ScalarMode::DisplayRounded(k) => round_display((a - b).abs(), k)?.to_f64(),
                    _ => (a - b).abs(),
                };
                SidePair {
                    center_side: [ci.clone(), cj.clone()],
                    outer_side: [oi.clone(), oj.clone()],
                    center_length: a,
                    outer_length: b,
                    difference: diff,
                    exact_difference: None,
                }
            }
        };
        out.push(pair);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::parse_program;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn e(n: i64) -> ExactScalar {
        ExactScalar::from_integer(n)
    }

    /// A=(3,4), B=(−3,4), C=(4,−3) on the circle of radius 5 about the origin.
    fn witness() -> TzitzeicaConfig {
        TzitzeicaConfig { o: (q(0, 1), q(0, 1)), r_sq: q(25, 1), t_a: q(1, 2), t_b: q(2, 1), t_c: q(-1, 3) }
    }

    #[test]
    fn witness_centers() {
        assert_eq!(witness().centers().unwrap(), [(q(3, 1), q(4, 1)), (q(-3, 1), q(4, 1)), (q(4, 1), q(-3, 1))]);
    }

    #[test]
    fn witness_program_evaluates_exactly() {
        let p = tzitzeica_program(&witness()).unwrap();
        let t = evaluate(&p, ScalarMode::Exact);
        let pt = |n: &str| t.get(n).unwrap().typed::<ExactScalar>().unwrap().as_point().unwrap().clone();
        assert_eq!(pt("P"), Point::new(e(0), e(8)));
        assert_eq!(pt("N"), Point::new(e(7), e(1)));
        assert_eq!(pt("M"), Point::new(e(1), e(1)));
        let m = t.get("m").unwrap().typed::<ExactScalar>().unwrap().as_circle().unwrap().clone();
        assert_eq!(m.center, Point::new(e(4), e(5)));
        assert_eq!(m.radius_sq, e(25));
        let v = check_tzitzeica(&p, ScalarMode::Exact, 0.0).unwrap();
        assert_eq!(v.outcome, Outcome::VerifiedExact);
        assert_eq!(parse_program(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn antipodal_and_coincident_centers() {
        let mut c = witness();
        c.t_c = q(-2, 1); // (3,4) and (−3,−4)
        c.t_b = q(1, 2);
        assert!(matches!(tzitzeica_program(&c), Err(TheoremError::DegenerateConfig(_))));
        let mut c = witness();
        c.t_b = c.t_a.clone();
        assert!(matches!(tzitzeica_program(&c), Err(TheoremError::DegenerateConfig(_))));
        let mut c = witness();
        c.r_sq = q(2, 1);
        assert!(matches!(tzitzeica_program(&c), Err(TheoremError::DegenerateConfig(_))));
    }

    #[test]
    fn moved_center_is_falsified() {
        let text = witness_text().replace("point C = free(4, -3)", "point C = free(4.5, -3)");
        let p = parse_program(&text).unwrap();
        let v = check_tzitzeica(&p, ScalarMode::Exact, 0.25).unwrap();
        assert!(matches!(v.outcome, Outcome::Falsified { .. }), "{v}");
    }

    fn witness_text() -> String {
        tzitzeica_program(&witness()).unwrap().to_string()
    }

    #[test]
    fn rhombus_lemma() {
        let c = |x: i64| Circle::new(Point::new(e(x), e(0)), e(25)).unwrap();
        let v = check_rhombus_lemma(&c(0), &c(6)).unwrap();
        assert_eq!(v.outcome, Outcome::VerifiedExact);
        for i in 1..=4 {
            assert_eq!(v.evidence(&format!("side{i}²")).unwrap().exact.as_deref(), Some("25"));
            assert_eq!(v.evidence(&format!("side{i} length")).unwrap().exact.as_deref(), Some("5"));
        }
        assert_eq!(check_rhombus_lemma(&c(0), &c(11)), Err(TheoremError::NotIntersecting));
        let small = Circle::new(Point::new(e(6), e(0)), e(16)).unwrap();
        assert_eq!(check_rhombus_lemma(&c(0), &small), Err(TheoremError::NotCongruent));
    }

    #[test]
    fn exact_side_pairs_match() {
        let p = tzitzeica_program(&witness()).unwrap();
        let pairs = parallelogram_side_report(&p, ScalarMode::Exact).unwrap();
        assert_eq!(pairs.len(), 3);
        for pr in pairs {
            assert!(pr.exact_difference.unwrap().is_zero());
        }
    }

    #[test]
    fn shape_mismatch() {
        let p = parse_program("point A = free(0,0)\ncircle c = circle(A, 1)").unwrap();
        assert!(matches!(check_tzitzeica(&p, ScalarMode::Exact, 0.25), Err(TheoremError::ShapeMismatch(_))));
    }

    #[test]
    fn verdict_json_shape() {
        let p = tzitzeica_program(&witness()).unwrap();
        let v = check_tzitzeica(&p, ScalarMode::Exact, 0.0).unwrap();
        let j = v.to_json();
        assert_eq!(j["schema"], "verdict/1");
        assert_eq!(j["outcome"]["kind"], "VerifiedExact");
    }
}
