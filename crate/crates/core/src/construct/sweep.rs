use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use super::eval::{evaluate, EvalTrace, ObjError, TraceScalar, Value};
use super::{ConstructionProgram, Ctor};
use crate::geom::{circle_circle_intersections, dist_sq, Circle};
use crate::numeric::{format_rational, parse_rational, ExactScalar, Scalar, ScalarMode};
use crate::theorems::{self, Outcome, TheoremError};

type Q = BigRational;

/// Where the dragged point travels; both forms stay rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SweepPath {
    Line {
        from: (Q, Q),
        to: (Q, Q),
    },
    /// Tan-half-angle parameter `t` running from `t0` to `t1`.
    Arc {
        center: (Q, Q),
        radius: Q,
        t0: Q,
        t1: Q,
    },
}

impl SweepPath {
    pub fn at(&self, s: &Q) -> (Q, Q) {
        match self {
            SweepPath::Line { from, to } => (&from.0 + (&to.0 - &from.0) * s, &from.1 + (&to.1 - &from.1) * s),
            SweepPath::Arc { center, radius, t0, t1 } => {
                let t = t0 + (t1 - t0) * s;
                let one = Q::one();
                let t2 = &t * &t;
                let den = &one + &t2;
                let c = (&one - &t2) / &den;
                let sn = (&t + &t) / &den;
                (&center.0 + radius * c, &center.1 + radius * sn)
            }
        }
    }
}

impl FromStr for SweepPath {
    type Err = SweepError;

    fn from_str(text: &str) -> Result<Self, SweepError> {
        let bad = || SweepError::BadPath(text.to_string());
        let text_t = text.trim();
        let (head, rest) = text_t.split_once('(').ok_or_else(bad)?;
        let inner = rest.strip_suffix(')').ok_or_else(bad)?;
        let nums: Vec<Q> = inner.split(',').map(parse_rational).collect::<Option<_>>().ok_or_else(bad)?;
        match (head.trim(), nums.as_slice()) {
            ("line", [x0, y0, x1, y1]) => {
                Ok(SweepPath::Line { from: (x0.clone(), y0.clone()), to: (x1.clone(), y1.clone()) })
            }
            ("arc", [cx, cy, r, t0, t1]) if r > &Q::zero() => Ok(SweepPath::Arc {
                center: (cx.clone(), cy.clone()),
                radius: r.clone(),
                t0: t0.clone(),
                t1: t1.clone(),
            }),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepCheck {
    /// Every object has a value.
    Defined,
    /// All circles share one radius.
    Congruent,
    /// Each congruent intersecting circle pair forms a rhombus with its intersections.
    Rhombus,
    /// The program's Tzitzeica verdict is a verification.
    Tzitzeica,
}

impl SweepCheck {
    pub fn name(self) -> &'static str {
        match self {
            SweepCheck::Defined => "defined",
            SweepCheck::Congruent => "congruent",
            SweepCheck::Rhombus => "rhombus",
            SweepCheck::Tzitzeica => "tzitzeica",
        }
    }
}

impl FromStr for SweepCheck {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, SweepError> {
        Ok(match s {
            "defined" => SweepCheck::Defined,
            "congruent" => SweepCheck::Congruent,
            "rhombus" => SweepCheck::Rhombus,
            "tzitzeica" => SweepCheck::Tzitzeica,
            _ => return Err(SweepError::UnknownCheck(s.to_string())),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub target: String,
    pub path: SweepPath,
    pub steps: usize,
    pub checks: Vec<SweepCheck>,
    pub mode: ScalarMode,
    /// Used by the approximate modes only.
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckOutcome {
    Pass,
    Fail,
    Undefined(ObjError),
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckOutcome::Pass => f.write_str("pass"),
            CheckOutcome::Fail => f.write_str("FAIL"),
            CheckOutcome::Undefined(e) => write!(f, "undefined ({e})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepStep {
    pub index: usize,
    pub s: Q,
    pub position: (Q, Q),
    pub outcomes: Vec<CheckOutcome>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub target: String,
    pub checks: Vec<SweepCheck>,
    pub steps: Vec<SweepStep>,
}

impl SweepReport {
    pub fn passed(&self, check: SweepCheck) -> usize {
        let Some(i) = self.checks.iter().position(|c| *c == check) else {
            return 0;
        };
        self.steps.iter().filter(|s| s.outcomes[i] == CheckOutcome::Pass).count()
    }

    pub fn all_passed(&self) -> bool {
        self.steps.iter().all(|s| s.outcomes.iter().all(|o| *o == CheckOutcome::Pass))
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for st in &self.steps {
            let cells: Vec<String> =
                self.checks.iter().zip(&st.outcomes).map(|(c, o)| format!("{}={o}", c.name())).collect();
            out.push_str(&format!(
                "step {} {} = ({}, {}): {}\n",
                st.index,
                self.target,
                format_rational(&st.position.0),
                format_rational(&st.position.1),
                cells.join(" ")
            ));
        }
        for c in &self.checks {
            out.push_str(&format!("{}: {}/{} passed\n", c.name(), self.passed(*c), self.steps.len()));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("`{0}` is not a free point")]
    NotFree(String),
    #[error("a sweep needs at least one step")]
    ZeroSteps,
    #[error("cannot parse path `{0}`; expected line(x0,y0,x1,y1) or arc(cx,cy,r,t0,t1)")]
    BadPath(String),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error(transparent)]
    Theorem(#[from] TheoremError),
}

/// Drags a free point along `path`, re-evaluating at `steps` evenly spaced
/// parameters. Steps run in parallel; results are ordered by index.
pub fn perturb_sweep(program: &ConstructionProgram, spec: &SweepSpec) -> Result<SweepReport, SweepError> {
    let idx = program.index_of(&spec.target).ok_or_else(|| SweepError::UnknownObject(spec.target.clone()))?;
    if !matches!(program.steps()[idx].ctor, Ctor::FreePoint(..)) {
        return Err(SweepError::NotFree(spec.target.clone()));
    }
    if spec.steps == 0 {
        return Err(SweepError::ZeroSteps);
    }
    if spec.checks.contains(&SweepCheck::Tzitzeica) {
        theorems::tzitzeica_shape(program)?;
    }
    let steps: Vec<SweepStep> = (0..spec.steps)
        .into_par_iter()
        .map(|i| {
            let s = if spec.steps == 1 { Q::zero() } else { Q::new(BigInt::from(i), BigInt::from(spec.steps - 1)) };
            let position = spec.path.at(&s);
            let moved = program.with_free_point(idx, position.0.clone(), position.1.clone());
            let trace = evaluate(&moved, spec.mode);
            let outcomes = spec.checks.iter().map(|c| run_check(*c, &moved, &trace, spec.tolerance)).collect();
            SweepStep { index: i, s, position, outcomes }
        })
        .collect();
    Ok(SweepReport { target: spec.target.clone(), checks: spec.checks.clone(), steps })
}

fn run_check(check: SweepCheck, program: &ConstructionProgram, trace: &EvalTrace, tol: f64) -> CheckOutcome {
    if let Some((_, e)) = trace.first_error() {
        return CheckOutcome::Undefined(e);
    }
    let verdict = |ok: Result<bool, ObjError>| match ok {
        Ok(true) => CheckOutcome::Pass,
        Ok(false) => CheckOutcome::Fail,
        Err(e) => CheckOutcome::Undefined(e),
    };
    match check {
        SweepCheck::Defined => CheckOutcome::Pass,
        SweepCheck::Congruent => verdict(match trace.mode {
            ScalarMode::Exact => congruent::<ExactScalar>(trace, tol),
            _ => congruent::<f64>(trace, tol),
        }),
        SweepCheck::Rhombus => verdict(match trace.mode {
            ScalarMode::Exact => rhombi::<ExactScalar>(trace, tol),
            _ => rhombi::<f64>(trace, tol),
        }),
        SweepCheck::Tzitzeica => match theorems::check_tzitzeica_trace(program, trace, tol) {
            Ok(v) => match v.outcome {
                Outcome::VerifiedExact | Outcome::VerifiedWithin { .. } => CheckOutcome::Pass,
                Outcome::Falsified { .. } => CheckOutcome::Fail,
                Outcome::Degenerate { reason } => CheckOutcome::Undefined(reason),
            },
            Err(_) => CheckOutcome::Fail,
        },
    }
}

pub(crate) fn close<S: Scalar>(a: &S, b: &S, tol: f64) -> Result<bool, ObjError> {
    if S::EXACT {
        Ok(a.equals(b)?)
    } else {
        Ok((a.to_f64() - b.to_f64()).abs() <= tol)
    }
}

fn circles<S: TraceScalar>(trace: &EvalTrace) -> Vec<&Circle<S>> {
    trace.objects.iter().filter_map(|o| o.typed::<S>().and_then(Value::as_circle)).collect()
}

fn congruent<S: TraceScalar>(trace: &EvalTrace, tol: f64) -> Result<bool, ObjError> {
    let cs = circles::<S>(trace);
    for c in cs.iter().skip(1) {
        if !close(&c.radius_sq, &cs[0].radius_sq, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn rhombi<S: TraceScalar>(trace: &EvalTrace, tol: f64) -> Result<bool, ObjError> {
    let cs = circles::<S>(trace);
    for (i, a) in cs.iter().enumerate() {
        for b in &cs[i + 1..] {
            if !close(&a.radius_sq, &b.radius_sq, tol)? {
                continue;
            }
            let pts = match circle_circle_intersections(a, b) {
                Ok(p) if p.len() == 2 => p,
                _ => continue,
            };
            let sides = [
                dist_sq(&a.center, &pts[0])?,
                dist_sq(&pts[0], &b.center)?,
                dist_sq(&b.center, &pts[1])?,
                dist_sq(&pts[1], &a.center)?,
            ];
            for s in &sides[1..] {
                if !close(s, &sides[0], tol)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
