//! Random expression generation shared by the property tests.
#![allow(dead_code)]

use exactgeo::analysis::Expr;
use num_rational::BigRational;
use proptest::prelude::*;

pub fn constant() -> impl Strategy<Value = Expr> {
    (-9i64..=9, 1i64..=4).prop_map(|(n, d)| Expr::Const(BigRational::new(n.into(), d.into())))
}

/// Expressions of depth at most `depth` over every node kind.
pub fn expr(depth: u32) -> BoxedStrategy<Expr> {
    let leaf = prop_oneof![3 => Just(Expr::X), 1 => constant()].boxed();
    if depth == 0 {
        return leaf;
    }
    let sub = expr(depth - 1);
    let b = |e: Expr| Box::new(e);
    prop_oneof![
        2 => leaf,
        1 => sub.clone().prop_map(move |a| Expr::Neg(b(a))),
        2 => (sub.clone(), sub.clone()).prop_map(move |(a, c)| Expr::Add(b(a), b(c))),
        1 => (sub.clone(), sub.clone()).prop_map(move |(a, c)| Expr::Sub(b(a), b(c))),
        2 => (sub.clone(), sub.clone()).prop_map(move |(a, c)| Expr::Mul(b(a), b(c))),
        2 => (sub.clone(), sub.clone()).prop_map(move |(a, c)| Expr::Div(b(a), b(c))),
        1 => (sub.clone(), -3i64..=5).prop_map(move |(a, n)| Expr::Pow(b(a), n)),
        1 => sub.clone().prop_map(move |a| Expr::Sin(b(a))),
        1 => sub.clone().prop_map(move |a| Expr::Cos(b(a))),
        1 => sub.clone().prop_map(move |a| Expr::Exp(b(a))),
        1 => sub.clone().prop_map(move |a| Expr::Ln(b(a))),
        1 => sub.clone().prop_map(move |a| Expr::Abs(b(a))),
        1 => sub.prop_map(move |a| Expr::Sqrt(b(a))),
    ]
    .boxed()
}

/// An interval inside [−10, 10], sometimes a single point.
pub fn interval() -> impl Strategy<Value = (f64, f64)> {
    (-10.0f64..10.0, prop_oneof![1 => Just(0.0), 4 => 0.0f64..4.0, 2 => 0.0f64..1e-3]).prop_map(|(lo, w)| (lo, lo + w))
}

/// `n` points spread over `[lo, hi]`, endpoints included.
pub fn samples(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| {
        let t = i as f64 / (n - 1) as f64;
        (lo + (hi - lo) * t).clamp(lo, hi)
    })
}
