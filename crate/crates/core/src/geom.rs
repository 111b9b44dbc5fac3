//! Points, circles, segments and polygons with exact predicates.
//!
//! All constructions are generic over [`Scalar`]; with [`ExactScalar`] every
//! predicate (equality, orientation, tangency) is decided exactly.
//!
//! [`ExactScalar`]: crate::numeric::ExactScalar

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use crate::numeric::{NumericError, Scalar, Sign};

/// Discriminants closer to zero than this count as tangency in float mode.
pub const FLOAT_TANGENCY_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("IdenticalCircles")]
    IdenticalCircles,
    #[error("CollinearPoints")]
    CollinearPoints,
    #[error("DuplicatePoints")]
    DuplicatePoints,
    #[error("NonPositiveRadius")]
    NonPositiveRadius,
    #[error("TooFewVertices")]
    TooFewVertices,
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Point<S> {
    pub x: S,
    pub y: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circle<S> {
    pub center: Point<S>,
    pub radius_sq: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment<S> {
    pub p: Point<S>,
    pub q: Point<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polygon<S> {
    pub vertices: Vec<Point<S>>,
}

/// Rational tan-half-angle parameter of a point on a circle.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GliderParam {
    Finite(BigRational),
    /// The point diametrically opposite `t = 0`.
    Infinity,
}

impl<S: Scalar> Point<S> {
    pub fn new(x: S, y: S) -> Self {
        Point { x, y }
    }

    pub fn from_rationals(x: &BigRational, y: &BigRational) -> Self {
        Point::new(S::from_rational(x), S::from_rational(y))
    }

    pub fn add(&self, o: &Point<S>) -> Result<Point<S>, NumericError> {
        Ok(Point::new(self.x.add(&o.x)?, self.y.add(&o.y)?))
    }

    pub fn sub(&self, o: &Point<S>) -> Result<Point<S>, NumericError> {
        Ok(Point::new(self.x.sub(&o.x)?, self.y.sub(&o.y)?))
    }

    pub fn scale(&self, s: &S) -> Result<Point<S>, NumericError> {
        Ok(Point::new(self.x.mul(s)?, self.y.mul(s)?))
    }

    pub fn equals(&self, o: &Point<S>) -> Result<bool, NumericError> {
        Ok(self.x.equals(&o.x)? && self.y.equals(&o.y)?)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

impl<S: Scalar> Circle<S> {
    pub fn new(center: Point<S>, radius_sq: S) -> Result<Self, GeomError> {
        if radius_sq.sign()? != Sign::Positive {
            return Err(GeomError::NonPositiveRadius);
        }
        Ok(Circle { center, radius_sq })
    }

    pub fn through(center: Point<S>, on: &Point<S>) -> Result<Self, GeomError> {
        let r2 = dist_sq(&center, on)?;
        Circle::new(center, r2)
    }

    pub fn radius(&self) -> Result<S, NumericError> {
        self.radius_sq.sqrt()
    }

    /// `dist²(p, center) − r²`; zero iff `p` is on the circle.
    pub fn residual(&self, p: &Point<S>) -> Result<S, NumericError> {
        dist_sq(p, &self.center)?.sub(&self.radius_sq)
    }
}

impl<S: Scalar> Segment<S> {
    pub fn length_sq(&self) -> Result<S, NumericError> {
        dist_sq(&self.p, &self.q)
    }

    pub fn length(&self) -> Result<S, NumericError> {
        self.length_sq()?.sqrt()
    }
}

pub fn dist_sq<S: Scalar>(p: &Point<S>, q: &Point<S>) -> Result<S, NumericError> {
    let dx = p.x.sub(&q.x)?;
    let dy = p.y.sub(&q.y)?;
    dx.square()?.add(&dy.square()?)
}

pub fn midpoint<S: Scalar>(p: &Point<S>, q: &Point<S>) -> Result<Point<S>, NumericError> {
    let half = S::from_rational(&BigRational::new(BigInt::one(), BigInt::from(2)));
    p.add(q)?.scale(&half)
}

/// `(q − p) × (r − p)`; positive when `r` is left of the directed line `p→q`.
pub fn orientation<S: Scalar>(p: &Point<S>, q: &Point<S>, r: &Point<S>) -> Result<S, NumericError> {
    let a = q.sub(p)?;
    let b = r.sub(p)?;
    a.x.mul(&b.y)?.sub(&a.y.mul(&b.x)?)
}

/// Intersection points of two circles, the one left of `center1→center2`
/// first. Tangent circles give one point; disjoint or concentric circles an
/// empty list.
pub fn circle_circle_intersections<S: Scalar>(c1: &Circle<S>, c2: &Circle<S>) -> Result<Vec<Point<S>>, GeomError> {
    let d = c2.center.sub(&c1.center)?;
    let l = d.x.square()?.add(&d.y.square()?)?;
    if l.is_zero()? {
        if c1.radius_sq.equals(&c2.radius_sq)? {
            return Err(GeomError::IdenticalCircles);
        }
        return Ok(Vec::new());
    }
    // m = L + r1² − r2², disc = 4·r1²·L − m²
    let m = l.add(&c1.radius_sq)?.sub(&c2.radius_sq)?;
    let four = S::from_i64(4);
    let disc = four.mul(&c1.radius_sq)?.mul(&l)?.sub(&m.square()?)?;
    let disc_sign = if S::EXACT || disc.to_f64().abs() > FLOAT_TANGENCY_EPS { disc.sign()? } else { Sign::Zero };
    let two_l = S::from_i64(2).mul(&l)?;
    let t = m.div(&two_l)?;
    let base = c1.center.add(&d.scale(&t)?)?;
    match disc_sign {
        Sign::Negative => Ok(Vec::new()),
        Sign::Zero => Ok(vec![base]),
        Sign::Positive => {
            let s = disc.sqrt()?.div(&two_l)?;
            let perp = Point::new(d.y.neg(), d.x.clone());
            let off = perp.scale(&s)?;
            Ok(vec![base.add(&off)?, base.sub(&off)?])
        }
    }
}

pub fn circumcircle<S: Scalar>(p1: &Point<S>, p2: &Point<S>, p3: &Point<S>) -> Result<Circle<S>, GeomError> {
    if p1.equals(p2)? || p1.equals(p3)? || p2.equals(p3)? {
        return Err(GeomError::DuplicatePoints);
    }
    let b = p2.sub(p1)?;
    let c = p3.sub(p1)?;
    let det = b.x.mul(&c.y)?.sub(&b.y.mul(&c.x)?)?;
    if det.is_zero()? {
        return Err(GeomError::CollinearPoints);
    }
    let d = S::from_i64(2).mul(&det)?;
    let b2 = b.x.square()?.add(&b.y.square()?)?;
    let c2 = c.x.square()?.add(&c.y.square()?)?;
    let ux = c.y.mul(&b2)?.sub(&b.y.mul(&c2)?)?.div(&d)?;
    let uy = b.x.mul(&c2)?.sub(&c.x.mul(&b2)?)?.div(&d)?;
    let radius_sq = ux.square()?.add(&uy.square()?)?;
    let center = p1.add(&Point::new(ux, uy))?;
    Ok(Circle { center, radius_sq })
}

/// Absolute shoelace area.
pub fn polygon_area<S: Scalar>(poly: &Polygon<S>) -> Result<S, GeomError> {
    let v = &poly.vertices;
    if v.len() < 3 {
        return Err(GeomError::TooFewVertices);
    }
    let mut twice = S::zero();
    for (i, p) in v.iter().enumerate() {
        let q = &v[(i + 1) % v.len()];
        twice = twice.add(&p.x.mul(&q.y)?.sub(&q.x.mul(&p.y)?)?)?;
    }
    let half = S::from_rational(&BigRational::new(BigInt::one(), BigInt::from(2)));
    Ok(twice.mul(&half)?.abs()?)
}

/// Four consecutive sides of equal length, vertices not all collinear.
pub fn is_rhombus<S: Scalar>(p1: &Point<S>, p2: &Point<S>, p3: &Point<S>, p4: &Point<S>) -> Result<bool, NumericError> {
    let sides = [dist_sq(p1, p2)?, dist_sq(p2, p3)?, dist_sq(p3, p4)?, dist_sq(p4, p1)?];
    for s in &sides[1..] {
        if !s.equals(&sides[0])? {
            return Ok(false);
        }
    }
    let collinear = orientation(p1, p2, p3)?.is_zero()? && orientation(p1, p2, p4)?.is_zero()?;
    Ok(!collinear)
}

pub fn congruent_circles<S: Scalar>(c1: &Circle<S>, c2: &Circle<S>) -> Result<bool, NumericError> {
    c1.radius_sq.equals(&c2.radius_sq)
}

/// `center + r·((1 − t²)/(1 + t²), 2t/(1 + t²))`, with `t = ∞` mapping to
/// `center + (−r, 0)`.
pub fn point_on_circle<S: Scalar>(c: &Circle<S>, t: &GliderParam) -> Result<Point<S>, NumericError> {
    let r = c.radius()?;
    let (cos, sin) = match t {
        GliderParam::Infinity => (BigRational::from_integer((-1).into()), BigRational::from_integer(0.into())),
        GliderParam::Finite(t) => {
            let one = BigRational::one();
            let t2 = t * t;
            let den = &one + &t2;
            ((&one - &t2) / &den, (t + t) / &den)
        }
    };
    let off = Point::new(S::from_rational(&cos).mul(&r)?, S::from_rational(&sin).mul(&r)?);
    c.center.add(&off)
}

impl From<(f64, f64)> for Point<f64> {
    fn from((x, y): (f64, f64)) -> Self {
        Point { x, y }
    }
}
