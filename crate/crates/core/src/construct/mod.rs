//! The construction language: programs of free and dependent objects,
//! their evaluation under a [`ScalarMode`](crate::numeric::ScalarMode), and
//! protocol/deviation reports.
//!
//! ```text
//! point A = free(-2.97, 2.45)
//! circle c = circle(A, 5)
//! ```

mod eval;
mod parse;
mod report;
mod sweep;

use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;
use thiserror::Error;

use crate::geom::GliderParam;
use crate::numeric::format_rational;

pub use eval::{evaluate, AnyValue, EvalTrace, ObjError, TraceEntry, TraceScalar, Value};
pub use parse::parse_program;
pub use report::{deviation_report, protocol_report, trace_json, DeviationReport, DeviationRow};
pub use sweep::{perturb_sweep, CheckOutcome, SweepCheck, SweepError, SweepPath, SweepReport, SweepSpec, SweepStep};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Point,
    Number,
    Circle,
    Segment,
    Polygon,
}

impl Kind {
    pub fn keyword(self) -> &'static str {
        match self {
            Kind::Point => "point",
            Kind::Number => "number",
            Kind::Circle => "circle",
            Kind::Segment => "segment",
            Kind::Polygon => "polygon",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Kind> {
        Some(match s {
            "point" => Kind::Point,
            "number" => Kind::Number,
            "circle" => Kind::Circle,
            "segment" => Kind::Segment,
            "polygon" => Kind::Polygon,
            _ => return None,
        })
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Which of two circle intersections; `first` is left of center1→center2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Radius {
    Literal(BigRational),
    /// A number (its value) or a segment (its length).
    Ref(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ctor {
    FreePoint(BigRational, BigRational),
    FreeNumber(BigRational),
    Intersect { c1: String, c2: String, branch: Branch },
    OnCircle { circle: String, t: GliderParam },
    Midpoint(String, String),
    CircleRadius { center: String, radius: Radius },
    CircleThrough { center: String, through: String },
    Circumcircle(String, String, String),
    Segment(String, String),
    Polygon(Vec<String>),
}

impl Ctor {
    pub fn is_free(&self) -> bool {
        matches!(self, Ctor::FreePoint(..) | Ctor::FreeNumber(_))
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            Ctor::FreePoint(..) | Ctor::FreeNumber(_) => "free",
            Ctor::Intersect { .. } => "intersect",
            Ctor::OnCircle { .. } => "on_circle",
            Ctor::Midpoint(..) => "midpoint",
            Ctor::CircleRadius { .. } => "circle",
            Ctor::CircleThrough { .. } => "circle_through",
            Ctor::Circumcircle(..) => "circumcircle",
            Ctor::Segment(..) => "segment",
            Ctor::Polygon(_) => "polygon",
        }
    }

    /// The kind of object this constructor produces.
    pub fn kind(&self) -> Kind {
        match self {
            Ctor::FreePoint(..) | Ctor::Intersect { .. } | Ctor::OnCircle { .. } | Ctor::Midpoint(..) => Kind::Point,
            Ctor::FreeNumber(_) => Kind::Number,
            Ctor::CircleRadius { .. } | Ctor::CircleThrough { .. } | Ctor::Circumcircle(..) => Kind::Circle,
            Ctor::Segment(..) => Kind::Segment,
            Ctor::Polygon(_) => Kind::Polygon,
        }
    }

    /// Referenced names with the kinds each position accepts.
    pub fn references(&self) -> Vec<(&str, &'static [Kind])> {
        const P: &[Kind] = &[Kind::Point];
        const C: &[Kind] = &[Kind::Circle];
        const R: &[Kind] = &[Kind::Number, Kind::Segment];
        match self {
            Ctor::FreePoint(..) | Ctor::FreeNumber(_) => vec![],
            Ctor::Intersect { c1, c2, .. } => vec![(c1, C), (c2, C)],
            Ctor::OnCircle { circle, .. } => vec![(circle, C)],
            Ctor::Midpoint(a, b) | Ctor::Segment(a, b) => vec![(a, P), (b, P)],
            Ctor::CircleRadius { center, radius } => {
                let mut v = vec![(center.as_str(), P)];
                if let Radius::Ref(r) = radius {
                    v.push((r.as_str(), R));
                }
                v
            }
            Ctor::CircleThrough { center, through } => vec![(center, P), (through, P)],
            Ctor::Circumcircle(a, b, c) => vec![(a, P), (b, P), (c, P)],
            Ctor::Polygon(vs) => vs.iter().map(|v| (v.as_str(), P)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Step {
    pub name: String,
    pub ctor: Ctor,
}

impl Step {
    pub fn kind(&self) -> Kind {
        self.ctor.kind()
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = format_rational;
        let args = match &self.ctor {
            Ctor::FreePoint(x, y) => format!("{}, {}", q(x), q(y)),
            Ctor::FreeNumber(v) => q(v),
            Ctor::Intersect { c1, c2, branch } => {
                let b = match branch {
                    Branch::First => "first",
                    Branch::Second => "second",
                };
                format!("{c1}, {c2}, {b}")
            }
            Ctor::OnCircle { circle, t } => match t {
                GliderParam::Finite(t) => format!("{circle}, {}", q(t)),
                GliderParam::Infinity => format!("{circle}, inf"),
            },
            Ctor::Midpoint(a, b) | Ctor::Segment(a, b) => format!("{a}, {b}"),
            Ctor::CircleRadius { center, radius } => match radius {
                Radius::Literal(r) => format!("{center}, {}", q(r)),
                Radius::Ref(r) => format!("{center}, {r}"),
            },
            Ctor::CircleThrough { center, through } => format!("{center}, {through}"),
            Ctor::Circumcircle(a, b, c) => format!("{a}, {b}, {c}"),
            Ctor::Polygon(vs) => vs.join(", "),
        };
        write!(f, "{} {} = {}({})", self.kind(), self.name, self.ctor.keyword(), args)
    }
}

/// An ordered, validated list of object definitions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ConstructionProgram {
    steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {col}: expected {}, found {found}", expected.join(" or "))]
    SyntaxError { line: usize, col: usize, expected: Vec<&'static str>, found: String },
    #[error("line {line}: duplicate name `{name}`")]
    DuplicateName { line: usize, name: String },
    #[error("line {line}: unknown reference `{name}`")]
    UnknownReference { line: usize, name: String },
    #[error("line {line}: `{name}` is used before its definition")]
    ForwardReference { line: usize, name: String },
    #[error("line {line}: `{name}` refers to itself")]
    CyclicDefinition { line: usize, name: String },
    #[error("line {line}: `{name}` is a {found}, expected {}", expected.iter().map(|k| k.keyword()).collect::<Vec<_>>().join(" or "))]
    TypeMismatch { line: usize, name: String, expected: Vec<Kind>, found: Kind },
    #[error("line {line}: {ctor}(..) does not build a {declared}")]
    KindMismatch { line: usize, declared: Kind, ctor: String },
    #[error("line {line}: {ctor} takes {expected} arguments, got {found}")]
    Arity { line: usize, ctor: String, expected: String, found: usize },
}

impl ParseError {
    pub fn line(&self) -> usize {
        match self {
            ParseError::SyntaxError { line, .. }
            | ParseError::DuplicateName { line, .. }
            | ParseError::UnknownReference { line, .. }
            | ParseError::ForwardReference { line, .. }
            | ParseError::CyclicDefinition { line, .. }
            | ParseError::TypeMismatch { line, .. }
            | ParseError::KindMismatch { line, .. }
            | ParseError::Arity { line, .. } => *line,
        }
    }
}

impl ConstructionProgram {
    /// Validates names and references; line numbers in errors are the
    /// 1-based step indices.
    pub fn from_steps(steps: Vec<Step>) -> Result<Self, ParseError> {
        let lines: Vec<usize> = (1..=steps.len()).collect();
        validate(&steps, &lines)?;
        Ok(ConstructionProgram { steps })
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.steps.iter().position(|s| s.name == name)
    }

    pub fn step(&self, name: &str) -> Option<&Step> {
        self.index_of(name).map(|i| &self.steps[i])
    }

    /// Replaces the literal of free point `name`; the caller guarantees it is one.
    pub(crate) fn with_free_point(&self, idx: usize, x: BigRational, y: BigRational) -> Self {
        let mut steps = self.steps.clone();
        steps[idx].ctor = Ctor::FreePoint(x, y);
        ConstructionProgram { steps }
    }
}

impl fmt::Display for ConstructionProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

pub(crate) fn validate(steps: &[Step], lines: &[usize]) -> Result<(), ParseError> {
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, s) in steps.iter().enumerate() {
        if index.insert(&s.name, i).is_some() {
            return Err(ParseError::DuplicateName { line: lines[i], name: s.name.clone() });
        }
    }
    for (i, s) in steps.iter().enumerate() {
        let line = lines[i];
        if let Ctor::Polygon(vs) = &s.ctor {
            if vs.len() < 3 {
                return Err(ParseError::Arity {
                    line,
                    ctor: "polygon".into(),
                    expected: "at least 3".into(),
                    found: vs.len(),
                });
            }
        }
        for (name, kinds) in s.ctor.references() {
            let name_owned = name.to_string();
            match index.get(name) {
                Some(&j) if j == i => return Err(ParseError::CyclicDefinition { line, name: name_owned }),
                Some(&j) if j > i => return Err(ParseError::ForwardReference { line, name: name_owned }),
                Some(&j) => {
                    let found = steps[j].kind();
                    if !kinds.contains(&found) {
                        return Err(ParseError::TypeMismatch {
                            line,
                            name: name_owned,
                            expected: kinds.to_vec(),
                            found,
                        });
                    }
                }
                None => return Err(ParseError::UnknownReference { line, name: name_owned }),
            }
        }
    }
    Ok(())
}
