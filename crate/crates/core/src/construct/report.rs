use std::cmp::Ordering;
use std::fmt::Write as _;

use serde_json::{json, Map, Value as Json};

use super::eval::{evaluate, AnyValue, EvalTrace, ObjError, TraceEntry, Value};
use super::ConstructionProgram;
use crate::numeric::{round_display, Decimal, ExactScalar, Scalar, ScalarMode};

/// Protocol-style listing: free objects, then dependent ones, in step order.
///
/// Exact mode prints exact values and, when they differ, a two-decimal
/// approximation after `≈`.
pub fn protocol_report(trace: &EvalTrace) -> String {
    let mut out = String::from("Free objects\n");
    for o in trace.objects.iter().filter(|o| o.free) {
        out.push_str(&object_line(o, trace.mode));
        out.push('\n');
    }
    out.push_str("Dependent objects\n");
    for o in trace.objects.iter().filter(|o| !o.free) {
        out.push_str(&object_line(o, trace.mode));
        out.push('\n');
    }
    out
}

fn object_line(o: &TraceEntry, mode: ScalarMode) -> String {
    let v = match &o.value {
        Err(e) => return format!("{}: undefined ({e})", o.name),
        Ok(v) => v,
    };
    match v {
        AnyValue::Exact(v) => {
            let exact = body(v, &|s: &ExactScalar| s.to_string());
            let approx = body(v, &|s: &ExactScalar| rounded(s.to_f64(), ScalarMode::DEFAULT_DECIMALS));
            let sep = separator(v);
            if exact == approx {
                format!("{}{sep}{exact}", o.name)
            } else {
                format!("{}{sep}{exact} ≈ {approx}", o.name)
            }
        }
        AnyValue::Float(v) => {
            let text = match mode {
                ScalarMode::DisplayRounded(k) => body(v, &|x: &f64| rounded(*x, k)),
                _ => body(v, &|x: &f64| format!("{x}")),
            };
            format!("{}{}{text}", o.name, separator(v))
        }
    }
}

fn rounded(x: f64, k: u32) -> String {
    round_display(x, k).map(|d| d.to_string()).unwrap_or_else(|_| "NaN".into())
}

fn separator<S>(v: &Value<S>) -> &'static str {
    match v {
        Value::Circle(_) => ": ",
        _ => " = ",
    }
}

fn body<S: Scalar>(v: &Value<S>, num: &dyn Fn(&S) -> String) -> String {
    match v {
        Value::Point(p) => format!("({}, {})", num(&p.x), num(&p.y)),
        Value::Number(x) => num(x),
        Value::Circle(c) => format!(
            "{} + {} = {}",
            square_term("x", &num(&c.center.x)),
            square_term("y", &num(&c.center.y)),
            num(&c.radius_sq)
        ),
        Value::Segment { length, .. } => num(length),
        Value::Polygon { area, .. } => num(area),
    }
}

/// `(x - c)²` with the sign folded in, `x²` for a zero offset.
fn square_term(var: &str, c: &str) -> String {
    if c == "0" {
        format!("{var}²")
    } else if c.contains(' ') {
        format!("({var} - ({c}))²")
    } else if let Some(mag) = c.strip_prefix('-') {
        format!("({var} + {mag})²")
    } else {
        format!("({var} - {c})²")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationRow {
    pub object: String,
    pub component: &'static str,
    pub exact: ExactScalar,
    pub rounded: Decimal,
    /// `|exact − rounded|`, computed exactly.
    pub deviation: ExactScalar,
}

/// Exact values against the `DisplayRounded(k)` pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport {
    pub decimals: u32,
    pub rows: Vec<DeviationRow>,
    pub max_deviation: ExactScalar,
    /// Objects undefined in either pipeline.
    pub undefined: Vec<(String, ObjError)>,
}

pub fn deviation_report(program: &ConstructionProgram, k: u32) -> Result<DeviationReport, ObjError> {
    let exact = evaluate(program, ScalarMode::Exact);
    let approx = evaluate(program, ScalarMode::DisplayRounded(k));
    let mut rows = Vec::new();
    let mut undefined = Vec::new();
    let mut max_deviation = ExactScalar::zero();
    for (e, a) in exact.objects.iter().zip(&approx.objects) {
        let (ev, av) = match (&e.value, &a.value) {
            (Ok(AnyValue::Exact(ev)), Ok(AnyValue::Float(av))) => (ev, av),
            (Err(err), _) | (_, Err(err)) => {
                if err.is_limit() {
                    return Err(*err);
                }
                undefined.push((e.name.clone(), *err));
                continue;
            }
            _ => unreachable!("mode-typed traces"),
        };
        for ((component, x), (_, y)) in ev.components().into_iter().zip(av.components()) {
            let rounded = round_display(*y, k).map_err(ObjError::from)?;
            let diff = x.sub(&ExactScalar::from_rational(rounded.to_rational()))?;
            let deviation = diff.abs()?;
            if deviation.cmp_exact(&max_deviation)? == Ordering::Greater {
                max_deviation = deviation.clone();
            }
            rows.push(DeviationRow { object: e.name.clone(), component, exact: x.clone(), rounded, deviation });
        }
    }
    Ok(DeviationReport { decimals: k, rows, max_deviation, undefined })
}

fn short(x: &ExactScalar) -> String {
    match x.as_rational() {
        Some(_) => x.to_string(),
        None => format!("≈{:.6}", x.to_f64()),
    }
}

impl DeviationReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "object\tcomponent\texact\trounded(k={})\tdeviation", self.decimals);
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                r.object,
                r.component,
                short(&r.exact),
                r.rounded.to_fixed(),
                short(&r.deviation)
            );
        }
        for (name, e) in &self.undefined {
            let _ = writeln!(out, "{name}: undefined ({e})");
        }
        let _ = writeln!(out, "max deviation: {}", short(&self.max_deviation));
        out
    }
}

/// `trace/1` JSON; deviations are attached when a report is given.
pub fn trace_json(trace: &EvalTrace, deviations: Option<&DeviationReport>) -> Json {
    let objects: Vec<Json> = trace
        .objects
        .iter()
        .map(|o| {
            let mut m = Map::new();
            m.insert("name".into(), json!(o.name));
            m.insert("kind".into(), json!(o.kind.keyword()));
            m.insert("free".into(), json!(o.free));
            match &o.value {
                Err(e) => {
                    m.insert("status".into(), json!(e.name()));
                    m.insert("value".into(), Json::Null);
                }
                Ok(v) => {
                    m.insert("status".into(), json!("ok"));
                    let value: Map<String, Json> =
                        v.components_f64().into_iter().map(|(l, x)| (l.to_string(), json!(x))).collect();
                    m.insert("value".into(), Json::Object(value));
                    if let AnyValue::Exact(ev) = v {
                        let exact: Map<String, Json> =
                            ev.components().into_iter().map(|(l, x)| (l.to_string(), json!(x.to_string()))).collect();
                        m.insert("exact_value".into(), Json::Object(exact));
                    }
                }
            }
            if let Some(d) = deviations {
                let dev: Map<String, Json> = d
                    .rows
                    .iter()
                    .filter(|r| r.object == o.name)
                    .map(|r| (r.component.to_string(), json!(r.deviation.to_f64())))
                    .collect();
                if !dev.is_empty() {
                    m.insert("deviation".into(), Json::Object(dev));
                }
            }
            Json::Object(m)
        })
        .collect();
    json!({
        "schema": "trace/1",
        "mode": trace.mode.to_string(),
        "objects": objects,
    })
}
