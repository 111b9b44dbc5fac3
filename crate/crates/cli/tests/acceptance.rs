//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use exactgeo::analysis::{
    adaptive_plot, certify_limit, eval_interval, eval_point, parse_expr, Expr, LimitValue, LimitVerdict, PlotCell,
    PlotSettings,
};
use exactgeo::construct::{evaluate, parse_program, trace_json, ConstructionProgram, EvalTrace, Value};
use exactgeo::geom::{Circle, Point};
use exactgeo::numeric::{ExactScalar, Interval, ScalarMode};
use exactgeo::theorems::{
    check_rhombus_lemma, check_tzitzeica, parallelogram_side_report, tzitzeica_program, Outcome, TheoremError,
    TzitzeicaConfig, DEFAULT_TOLERANCE,
};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Q = BigRational;
type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

const SEED: u64 = 0x7a17_2e1c;

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn program(name: &str) -> ConstructionProgram {
    parse_program(&fs::read_to_string(root().join("corpus/geo").join(name)).unwrap()).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, budget: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() <= budget, || format!("took {:.2}s, budget {budget}s", elapsed.as_secs_f64()))
}

fn rational_of(s: &ExactScalar) -> Option<Q> {
    s.normalized().as_rational().cloned()
}

fn point_of(t: &EvalTrace, name: &str) -> Option<(Q, Q)> {
    match t.get(name)?.typed::<ExactScalar>()? {
        Value::Point(p) => Some((rational_of(&p.x)?, rational_of(&p.y)?)),
        _ => None,
    }
}

fn circle_of(t: &EvalTrace, name: &str) -> Option<((Q, Q), Q)> {
    match t.get(name)?.typed::<ExactScalar>()? {
        Value::Circle(c) => Some(((rational_of(&c.center.x)?, rational_of(&c.center.y)?), rational_of(&c.radius_sq)?)),
        _ => None,
    }
}

fn random_q(rng: &mut ChaCha8Rng, span: i64, den: i64) -> Q {
    q(rng.gen_range(-span..=span), rng.gen_range(1..=den))
}

// 1. Random admissible configurations verify exactly.
fn exact_tzitzeica() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut verified, mut drawn) = (0, 0);
    while verified < 100 {
        drawn += 1;
        ensure(drawn < 1000, || "too few admissible configurations".into())?;
        let r_sq = q([1, 4, 25, 49][rng.gen_range(0..4)], 1);
        let config = TzitzeicaConfig {
            o: (random_q(&mut rng, 10, 5), random_q(&mut rng, 10, 5)),
            r_sq: r_sq.clone(),
            t_a: random_q(&mut rng, 20, 20),
            t_b: random_q(&mut rng, 20, 20),
            t_c: random_q(&mut rng, 20, 20),
        };
        let Ok(p) = tzitzeica_program(&config) else { continue };
        let v = match check_tzitzeica(&p, ScalarMode::Exact, 0.0) {
            Ok(v) => v,
            Err(TheoremError::DegenerateConfig(_)) => continue,
            Err(e) => return Err(format!("{config:?}: {e}")),
        };
        if let Outcome::Degenerate { .. } = v.outcome {
            continue;
        }
        ensure(v.outcome == Outcome::VerifiedExact, || format!("{config:?}: {}", v.outcome.name()))?;
        // residual exactly zero, read off the trace
        let t = evaluate(&p, ScalarMode::Exact);
        for c in ["a", "b", "c", "m"] {
            let radius_sq = circle_of(&t, c).map(|(_, r)| r);
            ensure(radius_sq.as_ref() == Some(&r_sq), || format!("{config:?}: {c} r² = {radius_sq:?}"))?;
        }
        verified += 1;
    }
    within(start.elapsed(), 5.0)?;
    Ok(format!("{verified} VerifiedExact ({drawn} drawn) in {:.2}s", start.elapsed().as_secs_f64()))
}

/// Reflection of `o` across the line through `a` and `b`: the second point
/// shared by the circles about `a` and `b` through `o`.
fn reflect(o: &(Q, Q), a: &(Q, Q), b: &(Q, Q)) -> (Q, Q) {
    let (dx, dy) = (&b.0 - &a.0, &b.1 - &a.1);
    let t = ((&o.0 - &a.0) * &dx + (&o.1 - &a.1) * &dy) / (&dx * &dx + &dy * &dy);
    let foot = (&a.0 + &t * &dx, &a.1 + &t * &dy);
    (&foot.0 + &foot.0 - &o.0, &foot.1 + &foot.1 - &o.1)
}

/// Circumcenter from two perpendicular bisectors, by Cramer's rule.
fn circumcenter(m: &(Q, Q), n: &(Q, Q), p: &(Q, Q)) -> (Q, Q) {
    let sq = |v: &(Q, Q)| &v.0 * &v.0 + &v.1 * &v.1;
    let two = q(2, 1);
    let (a1, b1, c1) = (&two * (&n.0 - &m.0), &two * (&n.1 - &m.1), sq(n) - sq(m));
    let (a2, b2, c2) = (&two * (&p.0 - &m.0), &two * (&p.1 - &m.1), sq(p) - sq(m));
    let det = &a1 * &b2 - &a2 * &b1;
    ((&c1 * &b2 - &c2 * &b1) / &det, (&a1 * &c2 - &a2 * &c1) / &det)
}

// 2. The rational witness against an independent oracle.
fn rational_witness() -> Check {
    let t = evaluate(&program("tzitzeica_witness.geo"), ScalarMode::Exact);
    let (o, a, b, c) = ((q(0, 1), q(0, 1)), (q(3, 1), q(4, 1)), (q(-3, 1), q(4, 1)), (q(4, 1), q(-3, 1)));
    let expected =
        [("P", reflect(&o, &a, &b), (0, 8)), ("N", reflect(&o, &a, &c), (7, 1)), ("M", reflect(&o, &b, &c), (1, 1))];
    for (name, oracle, listed) in &expected {
        ensure(*oracle == (q(listed.0, 1), q(listed.1, 1)), || format!("oracle {name} = {oracle:?}"))?;
        let got = point_of(&t, name);
        ensure(got.as_ref() == Some(oracle), || format!("{name} = {got:?}, oracle {oracle:?}"))?;
    }
    let center = circumcenter(&expected[2].1, &expected[1].1, &expected[0].1);
    let r_sq = {
        let p = &expected[0].1;
        (&p.0 - &center.0) * (&p.0 - &center.0) + (&p.1 - &center.1) * (&p.1 - &center.1)
    };
    ensure(center == (q(4, 1), q(5, 1)) && r_sq == q(25, 1), || format!("oracle circumcircle {center:?} {r_sq}"))?;
    let got = circle_of(&t, "m");
    ensure(got == Some((center, r_sq)), || format!("m = {got:?}"))?;
    Ok("P=(0,8) N=(7,1) M=(1,1), circumcenter (4,5), r²=25".into())
}

fn exact_circle(c: &(Q, Q), r_sq: &Q) -> Circle<ExactScalar> {
    Circle::new(Point::from_rationals(&c.0, &c.1), ExactScalar::from_rational(r_sq.clone())).unwrap()
}

fn sides_equal(v: &exactgeo::theorems::Verdict, r_sq: &Q) -> Result<(), String> {
    let want = ExactScalar::from_rational(r_sq.clone()).to_string();
    for i in 1..=4 {
        let label = format!("side{i}²");
        let got = v.evidence(&label).and_then(|e| e.exact.clone());
        ensure(got.as_deref() == Some(want.as_str()), || format!("{label} = {got:?}, want {want}"))?;
    }
    Ok(())
}

// 3. Congruent intersecting pairs form rhombi with exactly equal sides.
fn rhombus_lemma() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut checked = 0;
    while checked < 100 {
        let c1 = (random_q(&mut rng, 20, 4), random_q(&mut rng, 20, 4));
        let c2 = (random_q(&mut rng, 20, 4), random_q(&mut rng, 20, 4));
        let r_sq = q(rng.gen_range(1..=400), rng.gen_range(1..=4));
        let d_sq = (&c1.0 - &c2.0) * (&c1.0 - &c2.0) + (&c1.1 - &c2.1) * (&c1.1 - &c2.1);
        // intersecting in two points: 0 < d² < 4r²
        if d_sq == q(0, 1) || d_sq >= &r_sq * q(4, 1) {
            continue;
        }
        let v = check_rhombus_lemma(&exact_circle(&c1, &r_sq), &exact_circle(&c2, &r_sq))
            .map_err(|e| format!("{c1:?} {c2:?} {r_sq}: {e}"))?;
        ensure(v.outcome == Outcome::VerifiedExact, || format!("{c1:?} {c2:?} {r_sq}: {}", v.outcome.name()))?;
        sides_equal(&v, &r_sq)?;
        checked += 1;
    }
    let r25 = q(25, 1);
    let v = check_rhombus_lemma(&exact_circle(&(q(0, 1), q(0, 1)), &r25), &exact_circle(&(q(6, 1), q(0, 1)), &r25))
        .map_err(|e| e.to_string())?;
    ensure(v.outcome == Outcome::VerifiedExact, || v.outcome.name().into())?;
    sides_equal(&v, &r25)?;
    Ok(format!("{checked} random pairs are rhombi; r=5 pair has all sides² = 25"))
}

fn approx_components(t: &EvalTrace, name: &str) -> Vec<f64> {
    t.get(name).unwrap().value.as_ref().unwrap().components_f64().into_iter().map(|(_, x)| x).collect()
}

// 4. The rounded protocol rebuilt from its printed free objects.
fn rounded_protocol() -> Check {
    let start = Instant::now();
    let p = program("rounded_protocol.geo");
    let t = evaluate(&p, ScalarMode::DisplayRounded(2));
    let e = approx_components(&t, "e");
    ensure((24.80..=25.20).contains(&e[2]) && e[2] != 25.0, || format!("(a) e r² = {}", e[2]))?;
    let exact_e = circle_of(&evaluate(&p, ScalarMode::Exact), "e");
    ensure(exact_e.is_none_or(|(_, r)| r != q(25, 1)), || "(a) e r² is exactly 25".into())?;

    let v = check_tzitzeica(&p, ScalarMode::DisplayRounded(2), DEFAULT_TOLERANCE).map_err(|e| e.to_string())?;
    let center = &v.evidence("f center").ok_or("(b) no circumcenter")?.approx;
    let f_r_sq = v.evidence("f r²").ok_or("(b) no circumradius")?.approx[0];
    ensure((center[0] - 2.40).hypot(center[1] - 0.97) <= 0.05, || format!("(b) center {center:?}"))?;
    ensure((24.80..=25.20).contains(&f_r_sq), || format!("(b) f r² = {f_r_sq}"))?;

    let area = approx_components(&t, "poly2")[0];
    ensure((area - 30.05).abs() <= 0.10, || format!("(c) area {area}"))?;

    let pairs = parallelogram_side_report(&p, ScalarMode::DisplayRounded(2)).map_err(|e| e.to_string())?;
    let worst = pairs.iter().map(|s| s.difference).fold(0.0, f64::max);
    ensure(pairs.len() == 3 && worst <= 0.02, || format!("(d) side differences up to {worst}"))?;
    let exact =
        parallelogram_side_report(&program("tzitzeica_witness.geo"), ScalarMode::Exact).map_err(|e| e.to_string())?;
    ensure(exact.iter().all(|s| s.exact_difference.as_ref().is_some_and(|d| d.is_zero())), || {
        "(d) exact pairs differ".into()
    })?;
    within(start.elapsed(), 1.0)?;
    Ok(format!(
        "e r²={:.4}, f center=({:.3}, {:.3}) r²={f_r_sq:.4}, area={area:.2}, side gap ≤ {worst:.2}, {:.2}s",
        e[2],
        center[0],
        center[1],
        start.elapsed().as_secs_f64()
    ))
}

// 5. Limit certificates.
fn limits() -> Check {
    let mut slowest = 0.0f64;
    let mut run = |e: &str, at: &str| -> Result<LimitVerdict, String> {
        let expr = parse_expr(e).map_err(|err| err.to_string())?;
        let point = at.parse().map_err(|err: String| err)?;
        let start = Instant::now();
        let v = certify_limit(&expr, &point);
        within(start.elapsed(), 1.0).map_err(|m| format!("{e} at {at}: {m}"))?;
        slowest = slowest.max(start.elapsed().as_secs_f64());
        Ok(v)
    };
    let certified = |v: &LimitVerdict, want: i64| match v {
        LimitVerdict::Certified { value: LimitValue::Exact(x), .. } => *x == q(want, 1),
        _ => false,
    };
    let f = run("x*sin(1/x)", "0")?;
    ensure(certified(&f, 0), || format!("f: {f}"))?;
    let g = run("sin(x)/x", "0")?;
    ensure(certified(&g, 1), || format!("g: {g}"))?;
    let s = run("sin(1/x)", "0+")?;
    ensure(matches!(s, LimitVerdict::NoLimitCertified { .. }), || format!("sin(1/x): {s}"))?;
    let h = run("(1+1/x)^x", "inf")?;
    ensure(
        matches!(h, LimitVerdict::NumericEstimate { value, .. } if (value - std::f64::consts::E).abs() <= 1e-3),
        || format!("h: {h}"),
    )?;
    Ok(format!("f→0, g→1 certified; sin(1/x) no limit; h ≈ e; slowest {slowest:.3}s"))
}

/// Random expressions of bounded depth over every node kind.
fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    let b = Box::new;
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.75) { Expr::X } else { Expr::Const(q(rng.gen_range(-9..=9), rng.gen_range(1..=4))) };
    }
    let kind = rng.gen_range(0..12);
    let mut sub = || random_expr(rng, depth - 1);
    match kind {
        0 => Expr::Neg(b(sub())),
        1 => Expr::Add(b(sub()), b(sub())),
        2 => Expr::Sub(b(sub()), b(sub())),
        3 => Expr::Mul(b(sub()), b(sub())),
        4 => Expr::Div(b(sub()), b(sub())),
        5 => {
            let a = sub();
            Expr::Pow(b(a), rng.gen_range(-3..=5))
        }
        6 => Expr::Sin(b(sub())),
        7 => Expr::Cos(b(sub())),
        8 => Expr::Exp(b(sub())),
        9 => Expr::Ln(b(sub())),
        10 => Expr::Abs(b(sub())),
        _ => Expr::Sqrt(b(sub())),
    }
}

// 6. Interval enclosures contain every sampled value.
fn soundness() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let (mut violations, mut samples) = (0usize, 0usize);
    let mut first = None;
    for _ in 0..10_000 {
        let e = random_expr(&mut rng, 4);
        let lo = rng.gen_range(-10.0..10.0);
        let width = match rng.gen_range(0..7) {
            0 => 0.0,
            1 | 2 => rng.gen_range(0.0..1e-3),
            _ => rng.gen_range(0.0..4.0),
        };
        let x = Interval::new(lo, lo + width);
        let range = eval_interval(&e, x);
        for i in 0..20 {
            let xi = (lo + width * i as f64 / 19.0).min(x.hi);
            let y = eval_point(&e, xi);
            samples += 1;
            // an Err means certainly undefined: no sample may have a value
            let bad = match (&range, y) {
                (Ok(r), Some(y)) => !r.contains(y),
                (Err(_), Some(_)) => true,
                _ => false,
            };
            if bad {
                violations += 1;
                first.get_or_insert_with(|| format!("{e} at {xi}: {y:?} vs {range:?}"));
            }
        }
    }
    ensure(violations == 0, || format!("{violations} violations, first: {}", first.unwrap_or_default()))?;
    within(start.elapsed(), 30.0)?;
    Ok(format!("10000 pairs, {samples} samples, 0 violations in {:.2}s", start.elapsed().as_secs_f64()))
}

/// sin(x)/x: power series near 0, otherwise sin after reduction by a
/// two-part π.
fn sinc_oracle(x: f64) -> f64 {
    if x.abs() < 1.0 {
        let (mut term, mut sum) = (1.0f64, 0.0f64);
        let mut parts = vec![term];
        for k in 1..30 {
            term *= -x * x / ((2 * k) as f64 * (2 * k + 1) as f64);
            parts.push(term);
        }
        // smallest terms first
        for t in parts.iter().rev() {
            sum += t;
        }
        return sum;
    }
    const PI_HI: f64 = std::f64::consts::PI;
    const PI_LO: f64 = 1.224_646_799_147_353_2e-16;
    let n = (x / PI_HI).round();
    let r = (x - n * PI_HI) - n * PI_LO;
    let s = if (n as i64).rem_euclid(2) == 0 { r.sin() } else { -r.sin() };
    s / x
}

// 7. Plots of g and f.
fn plots() -> Check {
    let tol = 1e-3;
    let settings = |a: f64, b: f64| PlotSettings { domain: Interval::new(a, b), tol, ..PlotSettings::default() };
    let g = adaptive_plot(&parse_expr("sin(x)/x").unwrap(), &settings(-10.0, 10.0));
    let gaps: Vec<_> = g.cells.iter().filter(|c| matches!(c, PlotCell::Gap { .. })).collect();
    ensure(gaps.len() == 1, || format!("g has {} gaps", gaps.len()))?;
    let (a, b) = gaps[0].span();
    ensure(a <= 0.0 && 0.0 <= b, || format!("g gap at [{a}, {b}]"))?;
    let mut worst = 0.0f64;
    let mut points = 0;
    for c in &g.cells {
        if let PlotCell::Polyline { points: ps, .. } = c {
            for (x, y) in ps {
                worst = worst.max((y - sinc_oracle(*x)).abs());
                points += 1;
            }
        }
    }
    ensure(worst <= tol, || format!("g point error {worst}"))?;

    let f = adaptive_plot(&parse_expr("x*sin(1/x)").unwrap(), &settings(-0.1, 0.1));
    let mut boxes = 0;
    for c in &f.cells {
        if let PlotCell::Box { x0, x1, y } = c {
            let center = 0.5 * (x0 + x1);
            ensure(y.width() <= 2.0 * center.abs() + tol, || format!("f box at {center}: height {}", y.width()))?;
            boxes += 1;
        }
    }
    ensure(boxes > 0, || "f has no enclosure boxes".into())?;
    Ok(format!("g: 1 gap, {points} points within {worst:.1e}; f: {boxes} boxes under the envelope"))
}

fn files(dir: &Path, ext: &str) -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    out.sort();
    out
}

fn cli(args: &[&str]) -> Vec<u8> {
    Command::new(env!("CARGO_BIN_EXE_exactgeo")).args(args).env("GEO_COLOR", "0").output().unwrap().stdout
}

// 8. Round trips and byte-identical outputs.
fn round_trip_and_determinism() -> Check {
    let geo = files(&root().join("corpus/geo"), "geo");
    for f in &geo {
        let p = parse_program(&fs::read_to_string(f).unwrap()).map_err(|e| format!("{}: {e}", f.display()))?;
        let printed = p.to_string();
        let back = parse_program(&printed).map_err(|e| format!("{}: reparse: {e}", f.display()))?;
        ensure(back == p && back.to_string() == printed, || format!("{} does not round-trip", f.display()))?;
    }
    let exprs = files(&root().join("corpus/expr"), "expr");
    for f in &exprs {
        let e = parse_expr(fs::read_to_string(f).unwrap().trim()).map_err(|e| format!("{}: {e}", f.display()))?;
        let back = parse_expr(&e.to_string()).map_err(|e| format!("{}: reparse: {e}", f.display()))?;
        ensure(back == e, || format!("{} does not round-trip", f.display()))?;
    }

    let mut outputs = 0;
    for f in &geo {
        let p = parse_program(&fs::read_to_string(f).unwrap()).unwrap();
        let json = |m| serde_json::to_string(&trace_json(&evaluate(&p, m), None)).unwrap();
        for m in [ScalarMode::Exact, ScalarMode::Float, ScalarMode::DisplayRounded(2)] {
            ensure(json(m) == json(m), || format!("{}: trace JSON differs", f.display()))?;
            outputs += 1;
        }
    }
    let dir = std::env::temp_dir().join(format!("exactgeo-acceptance-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let mut svgs = Vec::new();
    for (i, e) in ["sin(x)/x", "x*sin(1/x)", "exp(-x^2)*sin(5*x)"].iter().enumerate() {
        for run in 0..2 {
            let out = dir.join(format!("{i}-{run}.svg"));
            let json = cli(&["plot", e, "--domain", "-1:1", "--json", "--svg", out.to_str().unwrap()]);
            svgs.push((json, fs::read(&out).unwrap()));
        }
    }
    fs::remove_dir_all(&dir).ok();
    for pair in svgs.chunks(2) {
        ensure(pair[0] == pair[1], || "plot output differs between runs".into())?;
        outputs += 2;
    }
    for f in &geo {
        let path = f.to_str().unwrap();
        for args in [vec!["draw", path], vec!["protocol", path, "--json"], vec!["draw", path, "--mode", "display"]] {
            ensure(cli(&args) == cli(&args), || format!("{args:?} differs between runs"))?;
            outputs += 1;
        }
    }
    Ok(format!("{} programs and {} expressions round-trip; {outputs} outputs byte-identical", geo.len(), exprs.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("exact Tzitzeica verification", exact_tzitzeica),
        ("rational witness", rational_witness),
        ("rhombus lemma", rhombus_lemma),
        ("rounded protocol reproduction", rounded_protocol),
        ("limit certificates", limits),
        ("interval soundness", soundness),
        ("plot acceptance", plots),
        ("round trip and determinism", round_trip_and_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
