//! Adaptive plotting with validated cells.
//!
//! The domain is bisected until each cell either has a thin enclosure
//! (drawn as a segment), is certainly undefined (a gap), or cannot be
//! resolved (a box covering every value the function may take there).

use serde_json::{json, Value as Json};

use super::enclose::{enclose, Enclosure};
use super::expr::Expr;
use super::taylor::taylor_model;
use crate::numeric::Interval;

const TM_DEGREE: usize = 3;
const TM_WINDOW: f64 = 32.0;
const OVERESTIMATE: f64 = 4.0;
/// Last attempt before a total cell at the depth limit becomes a box.
const TM_DEGREE_FINAL: usize = 16;
/// Children that keep at least this share of the parent's height count
/// as making no progress.
const STALL_RATIO: f64 = 0.9;
/// Subtrees above this depth are split across threads.
const PARALLEL_DEPTH: u32 = 8;

#[derive(Clone, Debug, PartialEq)]
pub enum PlotCell {
    Polyline { x0: f64, x1: f64, points: Vec<(f64, f64)> },
    Gap { x0: f64, x1: f64 },
    Box { x0: f64, x1: f64, y: Interval },
}

impl PlotCell {
    pub fn span(&self) -> (f64, f64) {
        match self {
            PlotCell::Polyline { x0, x1, .. } | PlotCell::Gap { x0, x1 } | PlotCell::Box { x0, x1, .. } => (*x0, *x1),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            PlotCell::Polyline { .. } => "polyline",
            PlotCell::Gap { .. } => "gap",
            PlotCell::Box { .. } => "box",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlotSettings {
    pub domain: Interval,
    pub y_clip: Interval,
    pub tol: f64,
    pub max_depth: u32,
}

impl Default for PlotSettings {
    fn default() -> Self {
        PlotSettings {
            domain: Interval::new(-10.0, 10.0),
            y_clip: Interval::new(-10.0, 10.0),
            tol: 1e-3,
            max_depth: 24,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlotData {
    pub expr: String,
    pub settings: PlotSettings,
    /// Cells in increasing `x`, tiling the domain. Adjacent segments are
    /// joined into one polyline and adjacent gaps into one gap.
    pub cells: Vec<PlotCell>,
}

impl PlotData {
    pub fn count(&self, kind: &str) -> usize {
        self.cells.iter().filter(|c| c.kind() == kind).count()
    }

    pub fn to_json(&self) -> Json {
        let s = &self.settings;
        let cells: Vec<Json> = self
            .cells
            .iter()
            .map(|c| match c {
                PlotCell::Polyline { x0, x1, points } => json!({
                    "kind": "polyline", "x0": x0, "x1": x1,
                    "points": points.iter().map(|(x, y)| json!([x, y])).collect::<Vec<_>>(),
                }),
                PlotCell::Gap { x0, x1 } => json!({"kind": "gap", "x0": x0, "x1": x1}),
                PlotCell::Box { x0, x1, y } => json!({"kind": "box", "x0": x0, "x1": x1, "y0": y.lo, "y1": y.hi}),
            })
            .collect();
        json!({
            "schema": "plot/1",
            "expr": self.expr,
            "domain": [s.domain.lo, s.domain.hi],
            "y_clip": [s.y_clip.lo, s.y_clip.hi],
            "tol": s.tol,
            "max_depth": s.max_depth,
            "cells": cells,
        })
    }
}

enum Raw {
    Segment { x0: f64, x1: f64, y0: f64, y1: f64 },
    Gap { x0: f64, x1: f64 },
    Box { x0: f64, x1: f64, y: Interval },
}

struct Plotter<'a> {
    e: &'a Expr,
    s: &'a PlotSettings,
    repeated: bool,
}

impl Plotter<'_> {
    /// Enclosure over `[a, b]`, tightened by a Taylor model when the plain
    /// interval evaluation is too wide. `None` means certainly undefined.
    fn cell_enclosure(&self, a: f64, b: f64) -> Option<Enclosure> {
        let mut en = enclose(self.e, Interval::new(a, b)).ok()?;
        // With a single occurrence of x, interval evaluation is already
        // tight. Otherwise a model pays off near the target resolution when
        // the enclosure overestimates the spread of the endpoint values.
        let h = self.height(&en.range);
        if self.repeated && en.total && h > self.s.tol && h <= TM_WINDOW * self.s.tol {
            let spread = match (self.e.eval(a), self.e.eval(b)) {
                (Some(ya), Some(yb)) => (ya - yb).abs(),
                _ => 0.0,
            };
            if h > OVERESTIMATE * (spread + self.s.tol) {
                self.tighten(a, b, &mut en, TM_DEGREE);
            }
        }
        Some(en)
    }

    fn tighten(&self, a: f64, b: f64, en: &mut Enclosure, degree: usize) {
        let xs = Interval::new(a, b);
        if let Some(c) = num_rational::BigRational::from_float(xs.mid()) {
            if let Ok(tm) = taylor_model(self.e, &c, degree, xs) {
                if let Some(r) = en.range.intersect(&tm.bound()) {
                    en.range = r;
                }
            }
        }
    }

    /// Height of the enclosure after clipping; an enclosure entirely
    /// outside the window has height zero.
    fn height(&self, r: &Interval) -> f64 {
        r.intersect(&self.s.y_clip).map_or(0.0, |c| c.width())
    }

    fn clip(&self, r: &Interval) -> Interval {
        r.intersect(&self.s.y_clip).unwrap_or_else(|| {
            let y = if r.lo > self.s.y_clip.hi { self.s.y_clip.hi } else { self.s.y_clip.lo };
            Interval::point(y)
        })
    }

    fn segment(&self, a: f64, b: f64, en: &Enclosure) -> Raw {
        // endpoints are defined because the cell is total
        let y = |x: f64| self.e.eval(x).unwrap_or_else(|| en.range.mid());
        Raw::Segment { x0: a, x1: b, y0: y(a), y1: y(b) }
    }

    fn run(&self, a: f64, b: f64, depth: u32, known: Option<Option<Enclosure>>) -> Vec<Raw> {
        let en = match known {
            Some(k) => k,
            None => self.cell_enclosure(a, b),
        };
        let Some(en) = en else { return vec![Raw::Gap { x0: a, x1: b }] };
        let h = self.height(&en.range);
        if en.total && h <= self.s.tol {
            return vec![self.segment(a, b, &en)];
        }
        let m = a + (b - a) / 2.0;
        if depth >= self.s.max_depth || !(a < m && m < b) {
            let mut en = en;
            if en.total && self.repeated {
                self.tighten(a, b, &mut en, TM_DEGREE_FINAL);
                if self.height(&en.range) <= self.s.tol {
                    return vec![self.segment(a, b, &en)];
                }
            }
            return vec![self.finish(a, b, &en)];
        }
        let left = self.cell_enclosure(a, m);
        let right = self.cell_enclosure(m, b);
        if en.total && b - a <= self.s.tol {
            let stalled = [&left, &right].iter().all(|c| {
                c.as_ref().is_some_and(|c| {
                    let ch = self.height(&c.range);
                    c.total && ch > self.s.tol && ch >= STALL_RATIO * h
                })
            });
            if stalled {
                return vec![self.finish(a, b, &en)];
            }
        }
        let (mut l, r) = if depth < PARALLEL_DEPTH {
            rayon::join(|| self.run(a, m, depth + 1, Some(left)), || self.run(m, b, depth + 1, Some(right)))
        } else {
            (self.run(a, m, depth + 1, Some(left)), self.run(m, b, depth + 1, Some(right)))
        };
        l.extend(r);
        l
    }

    fn finish(&self, a: f64, b: f64, en: &Enclosure) -> Raw {
        if en.range.is_bounded() {
            Raw::Box { x0: a, x1: b, y: self.clip(&en.range) }
        } else {
            Raw::Gap { x0: a, x1: b }
        }
    }
}

fn merge(raw: Vec<Raw>) -> Vec<PlotCell> {
    let mut out: Vec<PlotCell> = Vec::new();
    for r in raw {
        match (out.last_mut(), r) {
            (Some(PlotCell::Polyline { x1, points, .. }), Raw::Segment { x0, x1: nx1, y0, y1 }) if *x1 == x0 => {
                if points.last() != Some(&(x0, y0)) {
                    points.push((x0, y0));
                }
                points.push((nx1, y1));
                *x1 = nx1;
            }
            (Some(PlotCell::Gap { x1, .. }), Raw::Gap { x0, x1: nx1 }) if *x1 == x0 => *x1 = nx1,
            (_, Raw::Segment { x0, x1, y0, y1 }) => {
                out.push(PlotCell::Polyline { x0, x1, points: vec![(x0, y0), (x1, y1)] })
            }
            (_, Raw::Gap { x0, x1 }) => out.push(PlotCell::Gap { x0, x1 }),
            (_, Raw::Box { x0, x1, y }) => out.push(PlotCell::Box { x0, x1, y }),
        }
    }
    out
}

fn occurrences(e: &Expr) -> usize {
    match e {
        Expr::X => 1,
        _ => e.children().iter().map(|c| occurrences(c)).sum(),
    }
}

/// Plots `e` over `settings.domain`.
pub fn adaptive_plot(e: &Expr, settings: &PlotSettings) -> PlotData {
    let p = Plotter { e, s: settings, repeated: occurrences(e) > 1 };
    let raw = p.run(settings.domain.lo, settings.domain.hi, 0, None);
    PlotData { expr: e.to_string(), settings: settings.clone(), cells: merge(raw) }
}
