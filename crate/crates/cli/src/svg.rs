//! Deterministic SVG output for plots and constructions.
//!
//! Coordinates are printed with six decimals and elements appear in a fixed
//! order, so equal inputs give byte-identical documents.

use std::fmt::Write;

use exactgeo::analysis::{PlotCell, PlotData};
use exactgeo::construct::{EvalTrace, TraceScalar, Value};
use exactgeo::numeric::{ExactScalar, ScalarMode};

#[derive(Clone, Debug)]
pub struct Style {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    pub stroke: &'static str,
    pub box_fill: &'static str,
    pub axis: &'static str,
    pub point: &'static str,
}

impl Default for Style {
    fn default() -> Self {
        Style {
            width: 800.0,
            height: 600.0,
            margin: 20.0,
            stroke: "#1f4e9c",
            box_fill: "#d9534f",
            axis: "#999999",
            point: "#222222",
        }
    }
}

fn n(v: f64) -> String {
    // avoid "-0.000000"
    let s = format!("{v:.6}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0.000000".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Affine map from a world window to the canvas, `y` pointing up.
struct View {
    x0: f64,
    y0: f64,
    sx: f64,
    sy: f64,
    style: Style,
}

impl View {
    fn new(style: &Style, (x0, x1): (f64, f64), (y0, y1): (f64, f64), keep_aspect: bool) -> View {
        let w = (x1 - x0).max(1e-12);
        let h = (y1 - y0).max(1e-12);
        let (iw, ih) = (style.width - 2.0 * style.margin, style.height - 2.0 * style.margin);
        let (mut sx, mut sy) = (iw / w, ih / h);
        let (mut x0, mut y0) = (x0, y0);
        if keep_aspect {
            let s = sx.min(sy);
            // center the drawing in the spare direction
            x0 -= (iw / s - w) / 2.0;
            y0 -= (ih / s - h) / 2.0;
            sx = s;
            sy = s;
        }
        View { x0, y0, sx, sy, style: style.clone() }
    }

    fn x(&self, x: f64) -> f64 {
        self.style.margin + (x - self.x0) * self.sx
    }

    fn y(&self, y: f64) -> f64 {
        self.style.height - self.style.margin - (y - self.y0) * self.sy
    }

    fn header(&self, out: &mut String, title: &str) {
        let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
            n(self.style.width),
            n(self.style.height),
            n(self.style.width),
            n(self.style.height)
        );
        let _ = writeln!(out, "<title>{}</title>", escape(title));
    }
}

/// SVG for an adaptive plot: polylines for resolved cells, translucent
/// rectangles for enclosure boxes, nothing for gaps.
pub fn plot_svg(data: &PlotData, style: &Style) -> String {
    let s = &data.settings;
    let view = View::new(style, (s.domain.lo, s.domain.hi), (s.y_clip.lo, s.y_clip.hi), false);
    let mut out = String::new();
    view.header(&mut out, &format!("y = {}", data.expr));
    let (l, r) = (view.x(s.domain.lo), view.x(s.domain.hi));
    let (t, b) = (view.y(s.y_clip.hi), view.y(s.y_clip.lo));
    let _ = writeln!(
        out,
        r#"<defs><clipPath id="window"><path d="M {} {} H {} V {} H {} Z"/></clipPath></defs>"#,
        n(l),
        n(t),
        n(r),
        n(b),
        n(l)
    );
    if s.y_clip.contains(0.0) {
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="1"/>"#,
            n(l),
            n(view.y(0.0)),
            n(r),
            n(view.y(0.0)),
            style.axis
        );
    }
    if s.domain.contains(0.0) {
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="1"/>"#,
            n(view.x(0.0)),
            n(t),
            n(view.x(0.0)),
            n(b),
            style.axis
        );
    }
    let _ = writeln!(out, r#"<g clip-path="url(#window)">"#);
    // values far outside the window are pinned just beyond it
    let span = s.y_clip.width();
    let pin = |y: f64| y.clamp(s.y_clip.lo - span, s.y_clip.hi + span);
    for cell in &data.cells {
        match cell {
            PlotCell::Polyline { points, .. } => {
                let pts: Vec<String> =
                    points.iter().map(|(x, y)| format!("{},{}", n(view.x(*x)), n(view.y(pin(*y))))).collect();
                let _ = writeln!(
                    out,
                    r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
                    style.stroke,
                    pts.join(" ")
                );
            }
            PlotCell::Box { x0, x1, y } => {
                let (px, py) = (view.x(*x0), view.y(y.hi));
                let w = (view.x(*x1) - px).max(0.5);
                let h = (view.y(y.lo) - py).max(0.5);
                let _ = writeln!(
                    out,
                    r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}" fill-opacity="0.35" stroke="none"/>"#,
                    n(px),
                    n(py),
                    n(w),
                    n(h),
                    style.box_fill
                );
            }
            PlotCell::Gap { .. } => {}
        }
    }
    out.push_str("</g>\n</svg>\n");
    out
}

enum Shape {
    Point(String, (f64, f64)),
    Circle((f64, f64), f64),
    Segment((f64, f64), (f64, f64)),
    Polygon(Vec<(f64, f64)>),
}

fn shapes_of<S: TraceScalar>(trace: &EvalTrace) -> Vec<Shape> {
    let mut out = Vec::new();
    for entry in &trace.objects {
        let Some(v) = entry.typed::<S>() else { continue };
        match v {
            Value::Point(p) => out.push(Shape::Point(entry.name.clone(), p.to_f64())),
            Value::Circle(c) => out.push(Shape::Circle(c.center.to_f64(), c.radius_sq.to_f64().max(0.0).sqrt())),
            Value::Segment { segment, .. } => out.push(Shape::Segment(segment.p.to_f64(), segment.q.to_f64())),
            Value::Polygon { polygon, .. } => {
                out.push(Shape::Polygon(polygon.vertices.iter().map(|p| p.to_f64()).collect()))
            }
            Value::Number(_) => {}
        }
    }
    out
}

/// SVG for an evaluated construction. Undefined objects are skipped.
pub fn trace_svg(trace: &EvalTrace, style: &Style) -> String {
    let shapes = match trace.mode {
        ScalarMode::Exact => shapes_of::<ExactScalar>(trace),
        _ => shapes_of::<f64>(trace),
    };
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    let mut grow = |x: f64, y: f64, r: f64| {
        x0 = x0.min(x - r);
        x1 = x1.max(x + r);
        y0 = y0.min(y - r);
        y1 = y1.max(y + r);
    };
    for s in &shapes {
        match s {
            Shape::Point(_, (x, y)) => grow(*x, *y, 0.0),
            Shape::Circle((x, y), r) => grow(*x, *y, *r),
            Shape::Segment(p, q) => {
                grow(p.0, p.1, 0.0);
                grow(q.0, q.1, 0.0);
            }
            Shape::Polygon(vs) => vs.iter().for_each(|v| grow(v.0, v.1, 0.0)),
        }
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let pad = 0.05 * (x1 - x0).max(y1 - y0).max(1e-9);
    let view = View::new(style, (x0 - pad, x1 + pad), (y0 - pad, y1 + pad), true);
    let mut out = String::new();
    view.header(&mut out, &format!("construction ({})", trace.mode));
    let scale = view.sx;
    for s in &shapes {
        match s {
            Shape::Polygon(vs) => {
                let pts: Vec<String> = vs.iter().map(|(x, y)| format!("{},{}", n(view.x(*x)), n(view.y(*y)))).collect();
                let _ = writeln!(
                    out,
                    r#"<polygon points="{}" fill="{}" fill-opacity="0.12" stroke="{}" stroke-width="1"/>"#,
                    pts.join(" "),
                    style.stroke,
                    style.stroke
                );
            }
            Shape::Circle((x, y), r) => {
                let _ = writeln!(
                    out,
                    r#"<circle cx="{}" cy="{}" r="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
                    n(view.x(*x)),
                    n(view.y(*y)),
                    n(r * scale),
                    style.stroke
                );
            }
            Shape::Segment(p, q) => {
                let _ = writeln!(
                    out,
                    r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="1"/>"#,
                    n(view.x(p.0)),
                    n(view.y(p.1)),
                    n(view.x(q.0)),
                    n(view.y(q.1)),
                    style.axis
                );
            }
            Shape::Point(..) => {}
        }
    }
    // points last so they sit on top; drawn as paths to keep <circle> for circles
    for s in &shapes {
        if let Shape::Point(name, (x, y)) = s {
            let (px, py) = (view.x(*x), view.y(*y));
            let _ = writeln!(
                out,
                r#"<path d="M {} {} l 3 3 l -3 3 l -3 -3 Z" fill="{}"/>"#,
                n(px),
                n(py - 3.0),
                style.point
            );
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="{}">{}</text>"#,
                n(px + 5.0),
                n(py - 5.0),
                style.point,
                escape(name)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_have_six_places() {
        assert_eq!(n(1.0), "1.000000");
        assert_eq!(n(-0.0000001), "0.000000");
        assert_eq!(n(-2.5), "-2.500000");
    }
}
