use std::fmt;

use num_rational::BigRational;

use super::{Branch, ConstructionProgram, Ctor, Kind, Radius};
use crate::geom::{self, Circle, GeomError, Point, Polygon, Segment};
use crate::numeric::{display::snap, ExactScalar, NumericError, Scalar, ScalarMode, Sign};

/// Why an object has no value. Dependents inherit the reason unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjError {
    EmptyIntersection,
    IdenticalCircles,
    /// Circles meeting in a single point where two were required.
    TangentCircles,
    CollinearPoints,
    DuplicatePoints,
    NonPositiveRadius,
    TooFewVertices,
    DivisionByZero,
    NegativeRadicand,
    NonFinite,
    TowerDepthExceeded,
    PrecisionCapExceeded,
}

impl ObjError {
    pub fn name(self) -> &'static str {
        match self {
            ObjError::EmptyIntersection => "EmptyIntersection",
            ObjError::IdenticalCircles => "IdenticalCircles",
            ObjError::TangentCircles => "TangentCircles",
            ObjError::CollinearPoints => "CollinearPoints",
            ObjError::DuplicatePoints => "DuplicatePoints",
            ObjError::NonPositiveRadius => "NonPositiveRadius",
            ObjError::TooFewVertices => "TooFewVertices",
            ObjError::DivisionByZero => "DivisionByZero",
            ObjError::NegativeRadicand => "NegativeRadicand",
            ObjError::NonFinite => "NonFinite",
            ObjError::TowerDepthExceeded => "TowerDepthExceeded",
            ObjError::PrecisionCapExceeded => "PrecisionCapExceeded",
        }
    }

    /// An internal resource bound was hit rather than a degenerate input.
    pub fn is_limit(self) -> bool {
        matches!(self, ObjError::TowerDepthExceeded | ObjError::PrecisionCapExceeded)
    }
}

impl fmt::Display for ObjError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl From<NumericError> for ObjError {
    fn from(e: NumericError) -> Self {
        match e {
            NumericError::DivisionByZero => ObjError::DivisionByZero,
            NumericError::NegativeRadicand => ObjError::NegativeRadicand,
            NumericError::TowerDepthExceeded { .. } => ObjError::TowerDepthExceeded,
            NumericError::PrecisionCapExceeded { .. } => ObjError::PrecisionCapExceeded,
            NumericError::DomainViolation(_) | NumericError::NonFinite => ObjError::NonFinite,
        }
    }
}

impl From<GeomError> for ObjError {
    fn from(e: GeomError) -> Self {
        match e {
            GeomError::IdenticalCircles => ObjError::IdenticalCircles,
            GeomError::CollinearPoints => ObjError::CollinearPoints,
            GeomError::DuplicatePoints => ObjError::DuplicatePoints,
            GeomError::NonPositiveRadius => ObjError::NonPositiveRadius,
            GeomError::TooFewVertices => ObjError::TooFewVertices,
            GeomError::Numeric(n) => n.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value<S> {
    Point(Point<S>),
    Number(S),
    Circle(Circle<S>),
    Segment { segment: Segment<S>, length: S },
    Polygon { polygon: Polygon<S>, area: S },
}

impl<S: Scalar> Value<S> {
    /// Labelled scalar components, in report order.
    pub fn components(&self) -> Vec<(&'static str, &S)> {
        match self {
            Value::Point(p) => vec![("x", &p.x), ("y", &p.y)],
            Value::Number(v) => vec![("value", v)],
            Value::Circle(c) => vec![("cx", &c.center.x), ("cy", &c.center.y), ("radius_sq", &c.radius_sq)],
            Value::Segment { length, .. } => vec![("length", length)],
            Value::Polygon { area, .. } => vec![("area", area)],
        }
    }

    pub fn as_point(&self) -> Option<&Point<S>> {
        match self {
            Value::Point(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_circle(&self) -> Option<&Circle<S>> {
        match self {
            Value::Circle(c) => Some(c),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnyValue {
    Exact(Value<ExactScalar>),
    Float(Value<f64>),
}

impl AnyValue {
    /// Components as binary64.
    pub fn components_f64(&self) -> Vec<(&'static str, f64)> {
        match self {
            AnyValue::Exact(v) => v.components().into_iter().map(|(l, s)| (l, s.to_f64())).collect(),
            AnyValue::Float(v) => v.components().into_iter().map(|(l, s)| (l, *s)).collect(),
        }
    }
}

/// Access to the typed value of a trace entry.
pub trait TraceScalar: Scalar {
    fn extract(v: &AnyValue) -> Option<&Value<Self>>;
}

impl TraceScalar for ExactScalar {
    fn extract(v: &AnyValue) -> Option<&Value<Self>> {
        match v {
            AnyValue::Exact(v) => Some(v),
            AnyValue::Float(_) => None,
        }
    }
}

impl TraceScalar for f64 {
    fn extract(v: &AnyValue) -> Option<&Value<Self>> {
        match v {
            AnyValue::Float(v) => Some(v),
            AnyValue::Exact(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub name: String,
    pub kind: Kind,
    pub free: bool,
    pub value: Result<AnyValue, ObjError>,
}

impl TraceEntry {
    pub fn typed<S: TraceScalar>(&self) -> Option<&Value<S>> {
        self.value.as_ref().ok().and_then(S::extract)
    }
}

/// Evaluated objects in program order. In `DisplayRounded(k)` mode the
/// stored values are the reported (snapped) ones.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalTrace {
    pub mode: ScalarMode,
    pub objects: Vec<TraceEntry>,
}

impl EvalTrace {
    pub fn get(&self, name: &str) -> Option<&TraceEntry> {
        self.objects.iter().find(|o| o.name == name)
    }

    pub fn all_defined(&self) -> bool {
        self.objects.iter().all(|o| o.value.is_ok())
    }

    /// First undefined object, if any.
    pub fn first_error(&self) -> Option<(&str, ObjError)> {
        self.objects.iter().find_map(|o| o.value.as_ref().err().map(|e| (o.name.as_str(), *e)))
    }
}

pub fn evaluate(program: &ConstructionProgram, mode: ScalarMode) -> EvalTrace {
    let objects = match mode {
        ScalarMode::Exact => {
            let vals = eval_steps::<ExactScalar>(program, &|q| ExactScalar::from_rational(q.clone()));
            wrap(program, vals, AnyValue::Exact)
        }
        ScalarMode::Float => {
            let vals = eval_steps::<f64>(program, &|q| f64::from_rational(q));
            wrap(program, vals, AnyValue::Float)
        }
        ScalarMode::DisplayRounded(k) => {
            let lit = move |q: &BigRational| snap(f64::from_rational(q), k).unwrap_or(f64::NAN);
            let vals =
                eval_steps::<f64>(program, &lit).into_iter().map(|v| v.and_then(|v| snap_value(&v, k))).collect();
            wrap(program, vals, AnyValue::Float)
        }
    };
    EvalTrace { mode, objects }
}

fn wrap<S>(
    program: &ConstructionProgram,
    vals: Vec<Result<Value<S>, ObjError>>,
    f: fn(Value<S>) -> AnyValue,
) -> Vec<TraceEntry> {
    program
        .steps()
        .iter()
        .zip(vals)
        .map(|(s, v)| TraceEntry { name: s.name.clone(), kind: s.kind(), free: s.ctor.is_free(), value: v.map(f) })
        .collect()
}

fn snap_value(v: &Value<f64>, k: u32) -> Result<Value<f64>, ObjError> {
    let s = |x: f64| snap(x, k).map_err(ObjError::from);
    let sp = |p: &Point<f64>| -> Result<Point<f64>, ObjError> { Ok(Point::new(s(p.x)?, s(p.y)?)) };
    Ok(match v {
        Value::Point(p) => Value::Point(sp(p)?),
        Value::Number(x) => Value::Number(s(*x)?),
        Value::Circle(c) => Value::Circle(Circle { center: sp(&c.center)?, radius_sq: s(c.radius_sq)? }),
        Value::Segment { segment, length } => {
            Value::Segment { segment: Segment { p: sp(&segment.p)?, q: sp(&segment.q)? }, length: s(*length)? }
        }
        Value::Polygon { polygon, area } => Value::Polygon {
            polygon: Polygon { vertices: polygon.vertices.iter().map(sp).collect::<Result<_, _>>()? },
            area: s(*area)?,
        },
    })
}

pub(crate) fn eval_steps<S: Scalar>(
    program: &ConstructionProgram,
    lit: &dyn Fn(&BigRational) -> S,
) -> Vec<Result<Value<S>, ObjError>> {
    let mut out: Vec<Result<Value<S>, ObjError>> = Vec::with_capacity(program.len());
    for step in program.steps() {
        let v = eval_one(&step.ctor, &out, program, lit);
        out.push(v);
    }
    out
}

fn eval_one<S: Scalar>(
    ctor: &Ctor,
    done: &[Result<Value<S>, ObjError>],
    program: &ConstructionProgram,
    lit: &dyn Fn(&BigRational) -> S,
) -> Result<Value<S>, ObjError> {
    let get = |name: &str| -> Result<&Value<S>, ObjError> {
        let idx = program.index_of(name).expect("validated reference");
        done[idx].as_ref().map_err(|e| *e)
    };
    let point = |name: &str| -> Result<&Point<S>, ObjError> { Ok(get(name)?.as_point().expect("validated kind")) };
    let circle = |name: &str| -> Result<&Circle<S>, ObjError> { Ok(get(name)?.as_circle().expect("validated kind")) };
    Ok(match ctor {
        Ctor::FreePoint(x, y) => Value::Point(Point::new(lit(x), lit(y))),
        Ctor::FreeNumber(v) => Value::Number(lit(v)),
        Ctor::Intersect { c1, c2, branch } => {
            let pts = geom::circle_circle_intersections(circle(c1)?, circle(c2)?)?;
            let pick = match (branch, pts.len()) {
                (_, 0) => return Err(ObjError::EmptyIntersection),
                (Branch::First, _) => 0,
                (Branch::Second, n) => n - 1,
            };
            Value::Point(pts[pick].clone())
        }
        Ctor::OnCircle { circle: c, t } => Value::Point(geom::point_on_circle(circle(c)?, t)?),
        Ctor::Midpoint(a, b) => Value::Point(geom::midpoint(point(a)?, point(b)?)?),
        Ctor::CircleRadius { center, radius } => {
            let center = point(center)?.clone();
            let radius_sq = match radius {
                Radius::Literal(r) => {
                    let r = S::from_rational(r);
                    if r.sign()? != Sign::Positive {
                        return Err(ObjError::NonPositiveRadius);
                    }
                    r.square()?
                }
                Radius::Ref(name) => match get(name)? {
                    Value::Number(v) => {
                        if v.sign()? != Sign::Positive {
                            return Err(ObjError::NonPositiveRadius);
                        }
                        v.square()?
                    }
                    Value::Segment { segment, .. } => segment.length_sq()?,
                    _ => unreachable!("validated kind"),
                },
            };
            Value::Circle(Circle::new(center, radius_sq)?)
        }
        Ctor::CircleThrough { center, through } => {
            Value::Circle(Circle::through(point(center)?.clone(), point(through)?)?)
        }
        Ctor::Circumcircle(a, b, c) => Value::Circle(geom::circumcircle(point(a)?, point(b)?, point(c)?)?),
        Ctor::Segment(a, b) => {
            let segment = Segment { p: point(a)?.clone(), q: point(b)?.clone() };
            let length = segment.length()?;
            Value::Segment { segment, length }
        }
        Ctor::Polygon(vs) => {
            let polygon = Polygon { vertices: vs.iter().map(|v| point(v).cloned()).collect::<Result<_, _>>()? };
            let area = geom::polygon_area(&polygon)?;
            Value::Polygon { polygon, area }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::parse_program;

    #[test]
    fn failures_poison_dependents() {
        let p = parse_program(
            "point A = free(0,0)\npoint B = free(10,0)\ncircle c = circle(A, 1)\ncircle d = circle(B, 1)\n\
             point P = intersect(c, d, first)\nsegment s = segment(A, P)\ncircle e = circle(B, s)\npoint Q = midpoint(A, B)",
        )
        .unwrap();
        let t = evaluate(&p, ScalarMode::Exact);
        assert_eq!(t.get("P").unwrap().value, Err(ObjError::EmptyIntersection));
        assert_eq!(t.get("s").unwrap().value, Err(ObjError::EmptyIntersection));
        assert_eq!(t.get("e").unwrap().value, Err(ObjError::EmptyIntersection));
        assert!(t.get("Q").unwrap().value.is_ok());
    }

    #[test]
    fn snapped_inputs_and_outputs() {
        let p = parse_program("point A = free(1/3, 0)\npoint B = free(1, 1)\npoint M = midpoint(A, B)").unwrap();
        let t = evaluate(&p, ScalarMode::DisplayRounded(2));
        let a = t.get("A").unwrap().typed::<f64>().unwrap().as_point().unwrap().clone();
        assert_eq!(a.x, 0.33);
        let m = t.get("M").unwrap().typed::<f64>().unwrap().as_point().unwrap().clone();
        // (0.33 + 1)/2 = 0.665 snaps half away from zero
        assert_eq!(m.x, 0.67);
    }

    #[test]
    fn radius_by_number_and_segment() {
        let p = parse_program(
            "point A = free(0,0)\npoint B = free(3,4)\nnumber r = free(2)\nsegment s = segment(A, B)\n\
             circle c = circle(A, r)\ncircle d = circle(B, s)\nnumber z = free(0)\ncircle bad = circle(A, z)",
        )
        .unwrap();
        let t = evaluate(&p, ScalarMode::Exact);
        let rsq = |n: &str| t.get(n).unwrap().typed::<ExactScalar>().unwrap().as_circle().unwrap().radius_sq.clone();
        assert_eq!(rsq("c"), ExactScalar::from_integer(4));
        assert_eq!(rsq("d"), ExactScalar::from_integer(25));
        assert_eq!(t.get("bad").unwrap().value, Err(ObjError::NonPositiveRadius));
    }
}
