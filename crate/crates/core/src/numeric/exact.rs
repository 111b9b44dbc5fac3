//! Constructible reals as elements of a tower of real quadratic extensions.
//!
//! A tower `Q ⊂ Q(√g₁) ⊂ Q(√g₁,√g₂) ⊂ …` is stored flat: generator `i` is a
//! coordinate vector of length `2^i` over the tower prefix below it. An
//! element of a depth-`k` tower has `2^k` rational coordinates; bit `j` of a
//! coordinate index marks a factor `√g_j`. Every generator is positive and
//! not a square in its prefix field, so the coordinates of an element are
//! unique and zero is exactly the all-zero vector.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{NumericError, Sign};

type Q = BigRational;

/// Maximum number of adjoined square roots.
pub const MAX_TOWER_DEPTH: usize = 8;

/// Working-precision cap (bits) for sign determination.
pub const MAX_SIGN_PRECISION: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Tower(Arc<Vec<Vec<Q>>>);

impl Tower {
    pub fn rational() -> Self {
        Tower::default()
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    /// Generator `i` as coordinates over the first `i` generators.
    pub fn generators(&self) -> &[Vec<Q>] {
        &self.0
    }

    fn from_gens(gens: Vec<Vec<Q>>) -> Self {
        Tower(Arc::new(gens))
    }

    fn is_prefix_of(&self, other: &Tower) -> bool {
        self.depth() <= other.depth() && self.0[..] == other.0[..self.depth()]
    }

    fn cmp_key(&self, other: &Tower) -> Ordering {
        self.depth().cmp(&other.depth()).then_with(|| self.0.cmp(&other.0))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    tower: Tower,
    coords: Vec<Q>,
}

/// Closed interval with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalInterval {
    pub lo: Q,
    pub hi: Q,
}

impl RationalInterval {
    pub fn point(q: Q) -> Self {
        RationalInterval { lo: q.clone(), hi: q }
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn contains(&self, q: &Q) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn midpoint(&self) -> Q {
        (&self.lo + &self.hi) / Q::from_integer(BigInt::from(2))
    }

    /// Smallest binary64 interval containing this one.
    pub fn to_f64_outward(&self) -> super::Interval {
        let lo = rational_to_f64_down(&self.lo);
        let hi = rational_to_f64_up(&self.hi);
        super::Interval::new(lo, hi)
    }

    fn sign(&self) -> Option<Sign> {
        if self.lo.is_positive() {
            Some(Sign::Positive)
        } else if self.hi.is_negative() {
            Some(Sign::Negative)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Sign::Zero)
        } else {
            None
        }
    }
}

pub(crate) fn rational_to_f64_down(q: &Q) -> f64 {
    let x = q.to_f64().unwrap_or(if q.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY });
    match Q::from_float(x) {
        Some(back) if &back > q => x.next_down(),
        _ => x,
    }
}

pub(crate) fn rational_to_f64_up(q: &Q) -> f64 {
    let x = q.to_f64().unwrap_or(if q.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY });
    match Q::from_float(x) {
        Some(back) if &back < q => x.next_up(),
        _ => x,
    }
}

// ---------------------------------------------------------------------------
// coordinate-vector arithmetic over a tower prefix

fn zeros(len: usize) -> Vec<Q> {
    vec![Q::zero(); len]
}

fn is_zero_v(a: &[Q]) -> bool {
    a.iter().all(Zero::is_zero)
}

fn add_v(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub_v(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn neg_v(a: &[Q]) -> Vec<Q> {
    a.iter().map(|x| -x).collect()
}

fn scale_v(a: &[Q], s: &Q) -> Vec<Q> {
    a.iter().map(|x| x * s).collect()
}

fn concat(lo: Vec<Q>, hi: Vec<Q>) -> Vec<Q> {
    let mut v = lo;
    v.extend(hi);
    v
}

fn mul_v(gens: &[Vec<Q>], a: &[Q], b: &[Q]) -> Vec<Q> {
    let Some((g, lower)) = gens.split_last() else {
        return vec![&a[0] * &b[0]];
    };
    let half = a.len() / 2;
    let (a0, a1) = a.split_at(half);
    let (b0, b1) = b.split_at(half);
    let (z0, z1) = (is_zero_v(a1), is_zero_v(b1));
    if z0 && z1 {
        return concat(mul_v(lower, a0, b0), zeros(half));
    }
    let mut lo = mul_v(lower, a0, b0);
    if !z0 && !z1 {
        let t = mul_v(lower, &mul_v(lower, a1, b1), g);
        lo = add_v(&lo, &t);
    }
    let hi = match (z0, z1) {
        (true, _) => mul_v(lower, a0, b1),
        (_, true) => mul_v(lower, a1, b0),
        _ => add_v(&mul_v(lower, a0, b1), &mul_v(lower, a1, b0)),
    };
    concat(lo, hi)
}

/// Inverse of a nonzero element.
fn inv_v(gens: &[Vec<Q>], a: &[Q]) -> Vec<Q> {
    let Some((g, lower)) = gens.split_last() else {
        return vec![a[0].recip()];
    };
    let half = a.len() / 2;
    let (a0, a1) = a.split_at(half);
    if is_zero_v(a1) {
        return concat(inv_v(lower, a0), zeros(half));
    }
    // (a0 + a1√g)⁻¹ = (a0 − a1√g) / (a0² − a1²g)
    let norm = sub_v(&mul_v(lower, a0, a0), &mul_v(lower, &mul_v(lower, a1, a1), g));
    let inv_norm = inv_v(lower, &norm);
    concat(mul_v(lower, a0, &inv_norm), neg_v(&mul_v(lower, a1, &inv_norm)))
}

fn rational_sqrt(q: &Q) -> Option<Q> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Q::new(n, d))
}

/// Some square root of `a` inside its own field, if one exists.
///
/// Undetermined coefficients: `(u + v√g)² = a₀ + a₁√g` forces
/// `u² = (a₀ ± √(a₀² − a₁²g)) / 2` and `v = a₁ / 2u`.
fn try_sqrt_v(gens: &[Vec<Q>], a: &[Q]) -> Option<Vec<Q>> {
    let Some((g, lower)) = gens.split_last() else {
        return rational_sqrt(&a[0]).map(|r| vec![r]);
    };
    let half = a.len() / 2;
    let (a0, a1) = a.split_at(half);
    if is_zero_v(a1) {
        if let Some(r) = try_sqrt_v(lower, a0) {
            return Some(concat(r, zeros(half)));
        }
        if is_zero_v(a0) {
            return Some(zeros(a.len()));
        }
        let c2 = mul_v(lower, a0, &inv_v(lower, g));
        return try_sqrt_v(lower, &c2).map(|c| concat(zeros(half), c));
    }
    let norm = sub_v(&mul_v(lower, a0, a0), &mul_v(lower, &mul_v(lower, a1, a1), g));
    let s = try_sqrt_v(lower, &norm)?;
    let half_q = Q::new(BigInt::one(), BigInt::from(2));
    for s in [s.clone(), neg_v(&s)] {
        let u2 = scale_v(&add_v(a0, &s), &half_q);
        if is_zero_v(&u2) {
            continue;
        }
        if let Some(u) = try_sqrt_v(lower, &u2) {
            let two_u_inv = inv_v(lower, &scale_v(&u, &Q::from_integer(BigInt::from(2))));
            let v = mul_v(lower, a1, &two_u_inv);
            return Some(concat(u, v));
        }
    }
    None
}

/// Re-expresses an element of a source tower inside a target tower, given
/// the images of the source generators' square roots.
fn map_v(src_depth: usize, a: &[Q], images: &[Vec<Q>], target: &[Vec<Q>]) -> Vec<Q> {
    let len = 1usize << target.len();
    if src_depth == 0 {
        let mut v = zeros(len);
        v[0] = a[0].clone();
        return v;
    }
    let half = a.len() / 2;
    let (a0, a1) = a.split_at(half);
    let lo = map_v(src_depth - 1, a0, images, target);
    if is_zero_v(a1) {
        return lo;
    }
    let hi = map_v(src_depth - 1, a1, images, target);
    add_v(&lo, &mul_v(target, &hi, &images[src_depth - 1]))
}

fn lift_v(a: &[Q], new_depth: usize) -> Vec<Q> {
    let mut v = a.to_vec();
    v.resize(1usize << new_depth, Q::zero());
    v
}

// ---------------------------------------------------------------------------
// interval enclosures with rational endpoints on a 2^-w grid

fn floor_grid(q: &Q, w: u64) -> Q {
    let scaled = (q.numer() << w).div_floor(q.denom());
    Q::new(scaled, BigInt::one() << w)
}

fn ceil_grid(q: &Q, w: u64) -> Q {
    let scaled = (q.numer() << w).div_ceil(q.denom());
    Q::new(scaled, BigInt::one() << w)
}

fn round_out(lo: Q, hi: Q, w: u64) -> RationalInterval {
    RationalInterval { lo: floor_grid(&lo, w), hi: ceil_grid(&hi, w) }
}

fn iv_add(a: &RationalInterval, b: &RationalInterval) -> RationalInterval {
    RationalInterval { lo: &a.lo + &b.lo, hi: &a.hi + &b.hi }
}

fn iv_mul(a: &RationalInterval, b: &RationalInterval, w: u64) -> RationalInterval {
    let p = [&a.lo * &b.lo, &a.lo * &b.hi, &a.hi * &b.lo, &a.hi * &b.hi];
    let lo = p.iter().min().unwrap().clone();
    let hi = p.iter().max().unwrap().clone();
    round_out(lo, hi, w)
}

fn iv_sqrt(a: &RationalInterval, w: u64) -> RationalInterval {
    let scale = BigInt::one() << (2 * w);
    let denom = BigInt::one() << w;
    let lo = if a.lo.is_positive() {
        let n = (a.lo.numer() * &scale).div_floor(a.lo.denom());
        Q::new(n.sqrt(), denom.clone())
    } else {
        Q::zero()
    };
    let hi = if a.hi.is_positive() {
        let n = (a.hi.numer() * &scale).div_ceil(a.hi.denom());
        let r = n.sqrt();
        let r = if &r * &r == n { r } else { r + 1 };
        Q::new(r, denom)
    } else {
        Q::zero()
    };
    RationalInterval { lo, hi }
}

fn enclose_v(depth: usize, a: &[Q], roots: &[RationalInterval], w: u64) -> RationalInterval {
    if depth == 0 {
        return round_out(a[0].clone(), a[0].clone(), w);
    }
    let half = a.len() / 2;
    let (a0, a1) = a.split_at(half);
    let lo = enclose_v(depth - 1, a0, roots, w);
    if is_zero_v(a1) {
        return lo;
    }
    let hi = enclose_v(depth - 1, a1, roots, w);
    iv_add(&lo, &iv_mul(&hi, &roots[depth - 1], w))
}

/// Enclosures of the square roots of every generator at grid precision `w`.
fn generator_roots(gens: &[Vec<Q>], w: u64) -> Vec<RationalInterval> {
    let mut roots: Vec<RationalInterval> = Vec::with_capacity(gens.len());
    for (i, g) in gens.iter().enumerate() {
        let gi = enclose_v(i, g, &roots, w);
        roots.push(iv_sqrt(&gi, w));
    }
    roots
}

fn enclose_at(gens: &[Vec<Q>], a: &[Q], w: u64) -> RationalInterval {
    let roots = generator_roots(gens, w);
    enclose_v(gens.len(), a, &roots, w)
}

fn sign_v(gens: &[Vec<Q>], a: &[Q]) -> Result<Sign, NumericError> {
    if is_zero_v(a) {
        return Ok(Sign::Zero);
    }
    if gens.is_empty() {
        return Ok(if a[0].is_positive() { Sign::Positive } else { Sign::Negative });
    }
    let mut w = 64u64;
    loop {
        if let Some(s) = enclose_at(gens, a, w).sign() {
            if s != Sign::Zero {
                return Ok(s);
            }
        }
        if w >= MAX_SIGN_PRECISION {
            return Err(NumericError::PrecisionCapExceeded { bits: w });
        }
        w = (w * 2).min(MAX_SIGN_PRECISION);
    }
}

// ---------------------------------------------------------------------------
// normalization and tower merging

/// Drops every generator that neither the element nor any kept generator
/// refers to, compressing coordinate indices accordingly.
fn minimize(gens: &[Vec<Q>], coords: Vec<Q>) -> ExactScalar {
    let k = gens.len();
    if k == 0 {
        return ExactScalar { tower: Tower::rational(), coords };
    }
    let mut needed = vec![false; k];
    let mark = |v: &[Q], needed: &mut Vec<bool>| {
        for (idx, c) in v.iter().enumerate() {
            if !c.is_zero() {
                for (j, slot) in needed.iter_mut().enumerate() {
                    if idx >> j & 1 == 1 {
                        *slot = true;
                    }
                }
            }
        }
    };
    mark(&coords, &mut needed);
    for i in (0..k).rev() {
        if needed[i] {
            mark(&gens[i], &mut needed);
        }
    }
    if needed.iter().all(|&n| n) {
        return ExactScalar { tower: Tower::from_gens(gens.to_vec()), coords };
    }
    let kept: Vec<usize> = (0..k).filter(|&i| needed[i]).collect();
    let compress = |v: &[Q], width: usize| -> Vec<Q> {
        let mut out = zeros(1usize << width);
        for (idx, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut new_idx = 0usize;
            for (pos, &j) in kept.iter().enumerate() {
                if idx >> j & 1 == 1 {
                    new_idx |= 1 << pos;
                }
            }
            out[new_idx] = c.clone();
        }
        out
    };
    let new_gens: Vec<Vec<Q>> = kept.iter().enumerate().map(|(pos, &j)| compress(&gens[j], pos)).collect();
    let coords = compress(&coords, kept.len());
    ExactScalar { tower: Tower::from_gens(new_gens), coords }
}

/// Square roots of one tower's generators, expressed in a merged tower.
struct Embedding {
    images: Vec<Vec<Q>>,
    identity: bool,
}

impl Embedding {
    fn apply(&self, src: &Tower, a: &[Q], target: &[Vec<Q>]) -> Vec<Q> {
        if self.identity {
            lift_v(a, target.len())
        } else {
            map_v(src.depth(), a, &self.images, target)
        }
    }
}

fn positive_root(gens: &[Vec<Q>], r: Vec<Q>) -> Result<Vec<Q>, NumericError> {
    Ok(if sign_v(gens, &r)? == Sign::Negative { neg_v(&r) } else { r })
}

/// Smallest tower (built deterministically) containing both arguments.
fn join(a: &Tower, b: &Tower) -> Result<(Vec<Vec<Q>>, Embedding, Embedding), NumericError> {
    let ident = || Embedding { images: Vec::new(), identity: true };
    if a == b || b.is_prefix_of(a) {
        return Ok((a.0.to_vec(), ident(), ident()));
    }
    if a.is_prefix_of(b) {
        return Ok((b.0.to_vec(), ident(), ident()));
    }
    let swapped = a.cmp_key(b) == Ordering::Less;
    let (base, other) = if swapped { (b, a) } else { (a, b) };
    let mut gens = base.0.to_vec();
    let mut images: Vec<Vec<Q>> = Vec::with_capacity(other.depth());
    for (j, g) in other.0.iter().enumerate() {
        let mapped = map_v(j, g, &images, &gens);
        match try_sqrt_v(&gens, &mapped) {
            Some(r) => images.push(positive_root(&gens, r)?),
            None => {
                if gens.len() >= MAX_TOWER_DEPTH {
                    return Err(NumericError::TowerDepthExceeded { max: MAX_TOWER_DEPTH });
                }
                gens.push(mapped);
                let depth = gens.len();
                for img in images.iter_mut() {
                    *img = lift_v(img, depth);
                }
                let mut basis = zeros(1usize << depth);
                basis[1usize << (depth - 1)] = Q::one();
                images.push(basis);
            }
        }
    }
    let depth = gens.len();
    for img in images.iter_mut() {
        *img = lift_v(img, depth);
    }
    let mapped = Embedding { images, identity: false };
    Ok(if swapped { (gens, mapped, ident()) } else { (gens, ident(), mapped) })
}

/// Splits the largest square factor found by trial division out of `m`.
fn strip_square_factors(mut m: BigInt) -> (BigInt, BigInt) {
    let mut outside = BigInt::one();
    let mut p = 2u32;
    while p < 1000 {
        let pp = BigInt::from(p * p);
        while (&m % &pp).is_zero() {
            m /= &pp;
            outside *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (outside, m)
}

impl ExactScalar {
    pub fn from_rational(q: Q) -> Self {
        ExactScalar { tower: Tower::rational(), coords: vec![q] }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(Q::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn depth(&self) -> usize {
        self.tower.depth()
    }

    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        is_zero_v(&self.coords)
    }

    pub fn as_rational(&self) -> Option<&Q> {
        (self.depth() == 0).then(|| &self.coords[0])
    }

    /// Structural normal form: the minimal generator subset, in tower order.
    pub fn normalized(&self) -> Self {
        minimize(self.tower.generators(), self.coords.clone())
    }

    fn binary(
        &self,
        rhs: &Self,
        op: impl FnOnce(&[Vec<Q>], &[Q], &[Q]) -> Result<Vec<Q>, NumericError>,
    ) -> Result<Self, NumericError> {
        if self.tower == rhs.tower {
            let out = op(self.tower.generators(), &self.coords, &rhs.coords)?;
            return Ok(minimize(self.tower.generators(), out));
        }
        let (gens, ea, eb) = join(&self.tower, &rhs.tower)?;
        let a = ea.apply(&self.tower, &self.coords, &gens);
        let b = eb.apply(&rhs.tower, &rhs.coords, &gens);
        let out = op(&gens, &a, &b)?;
        Ok(minimize(&gens, out))
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, NumericError> {
        self.binary(rhs, |_, a, b| Ok(add_v(a, b)))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, NumericError> {
        self.binary(rhs, |_, a, b| Ok(sub_v(a, b)))
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, NumericError> {
        self.binary(rhs, |g, a, b| Ok(mul_v(g, a, b)))
    }

    pub fn div(&self, rhs: &Self) -> Result<Self, NumericError> {
        if rhs.is_zero() {
            return Err(NumericError::DivisionByZero);
        }
        self.binary(rhs, |g, a, b| Ok(mul_v(g, a, &inv_v(g, b))))
    }

    pub fn neg(&self) -> Self {
        ExactScalar { tower: self.tower.clone(), coords: neg_v(&self.coords) }
    }

    pub fn recip(&self) -> Result<Self, NumericError> {
        Self::one().div(self)
    }

    /// Nonnegative square root; extends the tower by one generator only when
    /// the value is not already a square in its own field.
    pub fn sqrt(&self) -> Result<Self, NumericError> {
        match self.sign()? {
            Sign::Negative => return Err(NumericError::NegativeRadicand),
            Sign::Zero => return Ok(Self::zero()),
            Sign::Positive => {}
        }
        let gens = self.tower.generators();
        if let Some(r) = try_sqrt_v(gens, &self.coords) {
            return Ok(minimize(gens, positive_root(gens, r)?));
        }
        if gens.len() >= MAX_TOWER_DEPTH {
            return Err(NumericError::TowerDepthExceeded { max: MAX_TOWER_DEPTH });
        }
        if let Some(q) = self.as_rational() {
            // √(n/d) = (s/d)·√m with n·d = s²·m
            let (s, m) = strip_square_factors(q.numer() * q.denom());
            let coeff = Q::new(s, q.denom().clone());
            return Ok(ExactScalar {
                tower: Tower::from_gens(vec![vec![Q::from_integer(m)]]),
                coords: vec![Q::zero(), coeff],
            });
        }
        let mut new_gens = gens.to_vec();
        new_gens.push(self.coords.clone());
        let depth = new_gens.len();
        let mut coords = zeros(1usize << depth);
        coords[1usize << (depth - 1)] = Q::one();
        Ok(ExactScalar { tower: Tower::from_gens(new_gens), coords })
    }

    /// Exact sign. Zero is decided structurally; nonzero values by interval
    /// refinement with doubling precision.
    pub fn sign(&self) -> Result<Sign, NumericError> {
        sign_v(self.tower.generators(), &self.coords)
    }

    pub fn cmp_exact(&self, rhs: &Self) -> Result<Ordering, NumericError> {
        Ok(match self.sub(rhs)?.sign()? {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        })
    }

    /// Rational enclosure of width at most `2^-precision`.
    pub fn to_interval(&self, precision: u32) -> RationalInterval {
        let gens = self.tower.generators();
        if gens.is_empty() {
            return RationalInterval::point(self.coords[0].clone());
        }
        let target = Q::new(BigInt::one(), BigInt::one() << precision);
        let mut w = precision as u64 + 16;
        loop {
            let iv = enclose_at(gens, &self.coords, w);
            if iv.width() <= target {
                return iv;
            }
            w *= 2;
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self.as_rational() {
            Some(q) => q.to_f64().unwrap_or(f64::NAN),
            None => self.to_interval(64).midpoint().to_f64().unwrap_or(f64::NAN),
        }
    }
}

impl From<Q> for ExactScalar {
    fn from(q: Q) -> Self {
        ExactScalar::from_rational(q)
    }
}

fn fmt_rational(q: &Q) -> String {
    super::format_rational(q)
}

fn fmt_generator(gens: &[Vec<Q>], i: usize) -> String {
    let g = &gens[i];
    if i == 0 || g[1..].iter().all(Zero::is_zero) {
        if g[0].is_integer() && g[0].is_positive() {
            return format!("√{}", g[0].numer());
        }
        return format!("√({})", fmt_rational(&g[0]));
    }
    format!("√({})", fmt_coords(&gens[..i], g))
}

fn fmt_coords(gens: &[Vec<Q>], coords: &[Q]) -> String {
    let mut out = String::new();
    for (idx, c) in coords.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let radicals: Vec<String> =
            (0..gens.len()).filter(|j| idx >> j & 1 == 1).map(|j| fmt_generator(gens, j)).collect();
        let neg = c.is_negative();
        let mag = c.abs();
        let body = if radicals.is_empty() {
            fmt_rational(&mag)
        } else if mag.is_one() {
            radicals.join("·")
        } else {
            format!("{}·{}", fmt_rational(&mag), radicals.join("·"))
        };
        match (out.is_empty(), neg) {
            (true, true) => out.push_str(&format!("-{body}")),
            (true, false) => out.push_str(&body),
            (false, true) => out.push_str(&format!(" - {body}")),
            (false, false) => out.push_str(&format!(" + {body}")),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_coords(self.tower.generators(), &self.coords))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> ExactScalar {
        ExactScalar::from_rational(Q::new(n.into(), d.into()))
    }

    fn int(n: i64) -> ExactScalar {
        ExactScalar::from_integer(n)
    }

    #[test]
    fn rational_identity() {
        let s = r(2, 3).add(&r(1, 3)).unwrap();
        assert_eq!(s, int(1));
    }

    #[test]
    fn sqrt2_squared_collapses_to_rational() {
        let s = int(2).sqrt().unwrap();
        assert_eq!(s.depth(), 1);
        assert_eq!(s.coords(), &[Q::zero(), Q::one()]);
        let sq = s.mul(&s).unwrap();
        assert_eq!(sq, int(2));
        assert_eq!(sq.depth(), 0);
    }

    #[test]
    fn golden_ratio_minimal_polynomial() {
        let phi = int(1).add(&int(5).sqrt().unwrap()).unwrap().div(&int(2)).unwrap();
        let p = phi.mul(&phi).unwrap().sub(&phi).unwrap().sub(&int(1)).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.sign().unwrap(), Sign::Zero);
    }

    #[test]
    fn perfect_squares_do_not_grow_the_tower() {
        assert_eq!(int(25).sqrt().unwrap(), int(5));
        let rt2 = int(2).sqrt().unwrap();
        let x = int(3).add(&int(2).mul(&rt2).unwrap()).unwrap();
        let s = x.sqrt().unwrap();
        assert_eq!(s.depth(), 1);
        assert_eq!(s, int(1).add(&rt2).unwrap());
        // 3 − 2√2 = (√2 − 1)², positive root chosen
        let y = int(3).sub(&int(2).mul(&rt2).unwrap()).unwrap();
        assert_eq!(y.sqrt().unwrap(), rt2.sub(&int(1)).unwrap());
    }

    #[test]
    fn rational_generators_are_square_reduced() {
        let s = int(8).sqrt().unwrap();
        assert_eq!(s.tower().generators()[0], vec![Q::from_integer(2.into())]);
        assert_eq!(s.coords()[1], Q::from_integer(2.into()));
        let t = r(1, 2).sqrt().unwrap();
        assert_eq!(t.mul(&t).unwrap(), r(1, 2));
    }

    #[test]
    fn negative_radicand() {
        assert_eq!(int(-1).sqrt(), Err(NumericError::NegativeRadicand));
        let x = int(1).sub(&int(2).sqrt().unwrap()).unwrap();
        assert_eq!(x.sqrt(), Err(NumericError::NegativeRadicand));
    }

    #[test]
    fn division_by_zero() {
        let z = int(2).sqrt().unwrap().mul(&int(0)).unwrap();
        assert_eq!(int(1).div(&z), Err(NumericError::DivisionByZero));
    }

    #[test]
    fn signs() {
        assert_eq!(int(0).sign().unwrap(), Sign::Zero);
        let rt2 = int(2).sqrt().unwrap();
        assert_eq!(rt2.mul(&rt2).unwrap().sub(&int(2)).unwrap().sign().unwrap(), Sign::Zero);
        let d = rt2.sub(&r(141421356, 100000000)).unwrap();
        assert_eq!(d.sign().unwrap(), Sign::Positive);
        let d = rt2.sub(&r(141421357, 100000000)).unwrap();
        assert_eq!(d.sign().unwrap(), Sign::Negative);
    }

    #[test]
    fn merging_independent_towers() {
        let a = int(2).sqrt().unwrap();
        let b = int(3).sqrt().unwrap();
        let s = a.add(&b).unwrap();
        assert_eq!(s.depth(), 2);
        // (√2+√3)² = 5 + 2√6, and √6 recognised as √2·√3
        let sq = s.mul(&s).unwrap();
        let six = int(6).sqrt().unwrap();
        let expected = int(5).add(&int(2).mul(&six).unwrap()).unwrap();
        assert!(sq.sub(&expected).unwrap().is_zero());
        assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
    }

    #[test]
    fn nested_radicals() {
        let rt2 = int(2).sqrt().unwrap();
        let x = int(1).add(&rt2).unwrap().sqrt().unwrap();
        assert_eq!(x.depth(), 2);
        let back = x.mul(&x).unwrap().sub(&int(1)).unwrap().sub(&rt2).unwrap();
        assert!(back.is_zero());
        let inv = x.recip().unwrap();
        assert!(inv.mul(&x).unwrap().sub(&int(1)).unwrap().is_zero());
    }

    #[test]
    fn to_interval_widths() {
        let iv = r(1, 3).to_interval(20);
        assert!(iv.contains(&Q::new(1.into(), 3.into())));
        let iv = int(2).sqrt().unwrap().to_interval(10);
        assert!(iv.width() <= Q::new(1.into(), 1024.into()));
        assert!(iv.lo <= Q::new(1414214.into(), 1000000.into()));
        assert!(iv.hi >= Q::new(1414213.into(), 1000000.into()));
        assert_eq!(int(0).to_interval(5), RationalInterval::point(Q::zero()));
    }

    #[test]
    fn display_forms() {
        assert_eq!(r(-3, 4).to_string(), "-0.75");
        assert_eq!(r(1, 3).to_string(), "1/3");
        let x = int(1).add(&int(2).sqrt().unwrap()).unwrap();
        assert_eq!(x.to_string(), "1 + √2");
        let y = x.sqrt().unwrap().mul(&int(3)).unwrap();
        assert_eq!(y.to_string(), "3·√(1 + √2)");
    }
}
