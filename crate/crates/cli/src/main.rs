//! `exactgeo`: exact dynamic geometry and validated function analysis from
//! the command line.
//!
//! Results go to stdout, diagnostics to stderr. Exit codes: 0 verified or
//! success, 1 falsified or no limit, 2 estimate only or inconclusive,
//! 3 degenerate input, 4 usage or parse error, 5 internal limit exceeded.

mod svg;

// A closed stdout (`exactgeo ... | head`) is not an error worth a panic.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = write!(std::io::stdout().lock(), $($t)*);
    }};
}

macro_rules! outln {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

use std::fs;
use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use exactgeo::analysis::{adaptive_plot, certify_limit, parse_expr, LimitPoint, LimitVerdict, PlotSettings};
use exactgeo::construct::{
    deviation_report, evaluate, parse_program, perturb_sweep, protocol_report, trace_json, ConstructionProgram, Kind,
    ObjError, SweepCheck, SweepError, SweepPath, SweepSpec, Value,
};
use exactgeo::numeric::{ExactScalar, Interval, ScalarMode};
use exactgeo::theorems::{check_rhombus_lemma, check_tzitzeica, Outcome, TheoremError, Verdict, DEFAULT_TOLERANCE};

#[derive(Parser)]
#[command(name = "exactgeo", version, about = "Exact dynamic geometry and validated function analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Float,
    Display,
}

#[derive(Args)]
struct ModeArgs {
    /// Scalar model for evaluation.
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    /// Decimals kept by `--mode display`.
    #[arg(long, default_value_t = ScalarMode::DEFAULT_DECIMALS)]
    decimals: u32,
}

impl ModeArgs {
    fn scalar_mode(&self) -> ScalarMode {
        match self.mode {
            Mode::Exact => ScalarMode::Exact,
            Mode::Float => ScalarMode::Float,
            Mode::Display => ScalarMode::DisplayRounded(self.decimals),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Theorem {
    Tzitzeica,
    Rhombus,
}

#[derive(Subcommand)]
enum Command {
    /// Verify a theorem on a construction.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "tzitzeica")]
        theorem: Theorem,
        #[command(flatten)]
        mode: ModeArgs,
        /// Acceptance bound for the approximate modes.
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        /// Print the verdict as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Print the construction protocol.
    Protocol {
        file: PathBuf,
        #[command(flatten)]
        mode: ModeArgs,
        /// Print the evaluation trace as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Compare exact values with their k-decimal display.
    Deviation {
        file: PathBuf,
        #[arg(long, default_value_t = ScalarMode::DEFAULT_DECIMALS)]
        decimals: u32,
        #[arg(long)]
        json: bool,
    },
    /// Drag a free point along a path and re-check properties.
    Sweep {
        file: PathBuf,
        #[arg(long)]
        target: String,
        /// line(x0,y0,x1,y1) or arc(cx,cy,r,t0,t1)
        #[arg(long, allow_hyphen_values = true)]
        path: String,
        #[arg(long)]
        steps: usize,
        /// defined, congruent, rhombus or tzitzeica
        #[arg(long = "check", required = true, num_args = 1..)]
        checks: Vec<String>,
        #[command(flatten)]
        mode: ModeArgs,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
    },
    /// Certify a limit: 0, 0+, 0-, a rational, inf or -inf.
    Limit {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long)]
        json: bool,
    },
    /// Adaptive validated plot of a function of x.
    Plot {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        /// x window as a:b
        #[arg(long, allow_hyphen_values = true, default_value = "-10:10")]
        domain: String,
        /// y window as a:b
        #[arg(long, allow_hyphen_values = true, default_value = "-10:10")]
        ylim: String,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value_t = 24)]
        max_depth: u32,
        /// Write the SVG here.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Print the plot data as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Draw a construction as SVG.
    Draw {
        file: PathBuf,
        #[command(flatten)]
        mode: ModeArgs,
        /// Write the SVG here instead of stdout.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Code {
    Success = 0,
    Negative = 1,
    Weak = 2,
    Degenerate = 3,
    Usage = 4,
    Limit = 5,
}

struct Failure {
    code: Code,
    message: String,
}

type Outcome_ = Result<Code, Failure>;

fn fail(code: Code, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

fn color_enabled() -> bool {
    match std::env::var("GEO_COLOR").as_deref() {
        Ok("1") => true,
        Ok("0") => false,
        _ => std::io::stderr().is_terminal(),
    }
}

fn diagnose(message: &str) {
    if color_enabled() {
        eprintln!("\x1b[1;31merror\x1b[0m: {message}");
    } else {
        eprintln!("error: {message}");
    }
}

fn obj_code(e: ObjError) -> Code {
    if e.is_limit() {
        Code::Limit
    } else {
        Code::Degenerate
    }
}

fn theorem_failure(e: TheoremError) -> Failure {
    let code = match &e {
        TheoremError::Numeric(o) => obj_code(*o),
        TheoremError::ShapeMismatch(_) => Code::Usage,
        TheoremError::NotCongruent | TheoremError::NotIntersecting | TheoremError::DegenerateConfig(_) => {
            Code::Degenerate
        }
    };
    fail(code, e.to_string())
}

fn load(path: &Path) -> Result<ConstructionProgram, Failure> {
    let text = fs::read_to_string(path).map_err(|e| fail(Code::Usage, format!("{}: {e}", path.display())))?;
    parse_program(&text).map_err(|e| fail(Code::Usage, format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| fail(Code::Usage, format!("{}: {e}", path.display())))
}

fn verdict_code(v: &Verdict) -> Code {
    match &v.outcome {
        Outcome::VerifiedExact | Outcome::VerifiedWithin { .. } => Code::Success,
        Outcome::Falsified { .. } => Code::Negative,
        Outcome::Degenerate { reason } => obj_code(*reason),
    }
}

fn pretty(json: &serde_json::Value) -> String {
    serde_json::to_string_pretty(json).expect("serializable")
}

/// The first two circles of the program, evaluated exactly.
fn rhombus_verdict(program: &ConstructionProgram) -> Result<Verdict, Failure> {
    let trace = evaluate(program, ScalarMode::Exact);
    let mut circles = Vec::new();
    for (step, entry) in program.steps().iter().zip(&trace.objects) {
        if step.kind() != Kind::Circle {
            continue;
        }
        match &entry.value {
            Ok(_) => {
                if let Some(Value::Circle(c)) = entry.typed::<ExactScalar>() {
                    circles.push(c.clone());
                }
            }
            Err(e) => return Err(fail(obj_code(*e), format!("{}: {e}", entry.name))),
        }
        if circles.len() == 2 {
            break;
        }
    }
    if circles.len() < 2 {
        return Err(fail(Code::Usage, "the rhombus lemma needs two circles"));
    }
    check_rhombus_lemma(&circles[0], &circles[1]).map_err(theorem_failure)
}

fn check(file: &Path, theorem: Theorem, mode: ScalarMode, tolerance: f64, json: bool) -> Outcome_ {
    let program = load(file)?;
    let verdict = match theorem {
        Theorem::Tzitzeica => check_tzitzeica(&program, mode, tolerance).map_err(theorem_failure)?,
        Theorem::Rhombus => rhombus_verdict(&program)?,
    };
    if json {
        outln!("{}", pretty(&verdict.to_json()));
    } else {
        outln!("{verdict}");
    }
    Ok(verdict_code(&verdict))
}

fn protocol(file: &Path, mode: ScalarMode, json: bool) -> Outcome_ {
    let program = load(file)?;
    let trace = evaluate(&program, mode);
    if json {
        outln!("{}", pretty(&trace_json(&trace, None)));
    } else {
        out!("{}", protocol_report(&trace));
    }
    Ok(match trace.first_error() {
        None => Code::Success,
        Some((_, e)) => obj_code(e),
    })
}

fn deviation(file: &Path, decimals: u32, json: bool) -> Outcome_ {
    let program = load(file)?;
    let report = deviation_report(&program, decimals).map_err(|e| fail(obj_code(e), e.to_string()))?;
    if json {
        let trace = evaluate(&program, ScalarMode::Exact);
        outln!("{}", pretty(&trace_json(&trace, Some(&report))));
    } else {
        out!("{}", report.render());
    }
    Ok(Code::Success)
}

fn sweep_failure(e: SweepError) -> Failure {
    match e {
        SweepError::Theorem(t) => theorem_failure(t),
        other => fail(Code::Usage, other.to_string()),
    }
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    file: &Path,
    target: String,
    path: &str,
    steps: usize,
    checks: &[String],
    mode: ScalarMode,
    tolerance: f64,
) -> Outcome_ {
    let program = load(file)?;
    let path: SweepPath = path.parse().map_err(sweep_failure)?;
    let checks =
        checks.iter().map(|c| c.parse::<SweepCheck>()).collect::<Result<Vec<_>, _>>().map_err(sweep_failure)?;
    let spec = SweepSpec { target, path, steps, checks, mode, tolerance };
    let report = perturb_sweep(&program, &spec).map_err(sweep_failure)?;
    out!("{}", report.render());
    Ok(if report.all_passed() { Code::Success } else { Code::Negative })
}

fn limit(expr: &str, at: &str, json: bool) -> Outcome_ {
    let e = parse_expr(expr).map_err(|err| fail(Code::Usage, format!("expression: {err}")))?;
    let point: LimitPoint = at.parse().map_err(|err: String| fail(Code::Usage, err))?;
    let verdict = certify_limit(&e, &point);
    if json {
        let mut j = verdict.to_json();
        j["schema"] = serde_json::json!("limit/1");
        j["expr"] = serde_json::json!(e.to_string());
        j["at"] = serde_json::json!(point.to_string());
        outln!("{}", pretty(&j));
    } else {
        outln!("{verdict}");
        match &verdict {
            LimitVerdict::Certified { certificate, .. } => {
                for line in certificate {
                    outln!("  {line}");
                }
            }
            LimitVerdict::NumericEstimate { probes, .. } => {
                for (x, y) in probes.iter().rev().take(5).rev() {
                    outln!("  f({x:e}) = {y}");
                }
            }
            _ => {}
        }
    }
    Ok(match verdict {
        LimitVerdict::Certified { .. } => Code::Success,
        LimitVerdict::NoLimitCertified { .. } => Code::Negative,
        LimitVerdict::NumericEstimate { .. } | LimitVerdict::Inconclusive { .. } => Code::Weak,
        LimitVerdict::Undefined { .. } => Code::Degenerate,
    })
}

fn window(text: &str, what: &str) -> Result<Interval, Failure> {
    let bad = || fail(Code::Usage, format!("{what}: expected a:b with a < b, got `{text}`"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    let (a, b): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(bad());
    }
    Ok(Interval::new(a, b))
}

#[allow(clippy::too_many_arguments)]
fn plot(
    expr: &str,
    domain: &str,
    ylim: &str,
    tol: f64,
    max_depth: u32,
    svg_out: Option<&Path>,
    json: bool,
) -> Outcome_ {
    let e = parse_expr(expr).map_err(|err| fail(Code::Usage, format!("expression: {err}")))?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(fail(Code::Usage, "--tol must be positive"));
    }
    let settings =
        PlotSettings { domain: window(domain, "--domain")?, y_clip: window(ylim, "--ylim")?, tol, max_depth };
    let data = adaptive_plot(&e, &settings);
    if let Some(path) = svg_out {
        write_file(path, &svg::plot_svg(&data, &svg::Style::default()))?;
    }
    if json {
        outln!("{}", serde_json::to_string(&data.to_json()).expect("serializable"));
    } else {
        outln!(
            "y = {}: {} cells ({} polyline, {} gap, {} box)",
            data.expr,
            data.cells.len(),
            data.count("polyline"),
            data.count("gap"),
            data.count("box")
        );
    }
    Ok(Code::Success)
}

fn draw(file: &Path, mode: ScalarMode, svg_out: Option<&Path>) -> Outcome_ {
    let program = load(file)?;
    let trace = evaluate(&program, mode);
    if let Some((name, e)) = trace.first_error() {
        if e.is_limit() {
            return Err(fail(Code::Limit, format!("{name}: {e}")));
        }
        diagnose(&format!("{name}: {e}; undefined objects are not drawn"));
    }
    let doc = svg::trace_svg(&trace, &svg::Style::default());
    match svg_out {
        Some(path) => write_file(path, &doc)?,
        None => out!("{doc}"),
    }
    Ok(Code::Success)
}

fn run(cli: Cli) -> Outcome_ {
    match cli.command {
        Command::Check { file, theorem, mode, tolerance, json } => {
            check(&file, theorem, mode.scalar_mode(), tolerance, json)
        }
        Command::Protocol { file, mode, json } => protocol(&file, mode.scalar_mode(), json),
        Command::Deviation { file, decimals, json } => deviation(&file, decimals, json),
        Command::Sweep { file, target, path, steps, checks, mode, tolerance } => {
            sweep(&file, target, &path, steps, &checks, mode.scalar_mode(), tolerance)
        }
        Command::Limit { expr, at, json } => limit(&expr, &at, json),
        Command::Plot { expr, domain, ylim, tol, max_depth, svg, json } => {
            plot(&expr, &domain, &ylim, tol, max_depth, svg.as_deref(), json)
        }
        Command::Draw { file, mode, svg } => draw(&file, mode.scalar_mode(), svg.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { Code::Usage } else { Code::Success };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(f) => {
            diagnose(&f.message);
            f.code
        }
    };
    ExitCode::from(code as u8)
}
