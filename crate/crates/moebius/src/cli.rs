//! Command-line interface.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use moebius_core::complex::{
    build_complex, delta_estimate, sphere_points, tangent_dimension, visual_recovery_check, Complex, Options,
    Strategy,
};
use moebius_core::hull::{ball_hull_check, hyperconvexity_witness, tight_span};
use moebius_core::relations::relation_of_point;
use moebius_core::teich::{
    classify4, classify4_log, d_moeb, geodesic_point, lattice_fingerprint, moebius_symmetries, normalize, phi,
    phi_inverse, NormalizedAntipodal, Region4, SimplexPoint,
};
use moebius_core::{Error, LogSpace, MoebiusVector, Rational, SeparatingMatrix, Tolerance};
use serde_json::{json, Value};

use crate::acceptance;
use crate::dot::hasse_dot;
use crate::format::{
    parse_balls, parse_list, parse_metric, parse_space, relation_pairs, to_json, ComplexFile, FormatError, Num,
    ParsedMetric, ParsedSpace,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_LIMIT: i32 = 4;
pub const EXIT_INTERNAL: i32 = 5;

pub const MAX_N_ENV: &str = "MOEBIUS_MAX_N";

#[derive(Parser, Debug)]
#[command(name = "moebius", version, about = "Polyhedral Moebius spaces of finite antipodal spaces")]
pub struct Cli {
    /// Input file (default: standard input).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Float comparison tolerance.
    #[arg(long, global = true, default_value_t = Tolerance::DEFAULT_EPS)]
    pub tol: f64,
    /// Largest accepted number of points; `MOEBIUS_MAX_N` takes precedence.
    #[arg(long, global = true, default_value_t = moebius_core::complex::DEFAULT_MAX_N)]
    pub max_n: usize,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    VertexFirst,
    SubsetWalk,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate an antipodal space file.
    Validate,
    /// Build the complex of the Moebius space.
    Complex {
        #[arg(long, value_enum, default_value_t = StrategyArg::VertexFirst)]
        strategy: StrategyArg,
    },
    /// List the unbounded cells.
    Rays,
    /// Decide membership of a point.
    Membership {
        /// Comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        tau: String,
    },
    /// Sphere points at radius `r`.
    Sphere {
        #[arg(long, allow_hyphen_values = true)]
        r: String,
    },
    /// Compare the ball of radius `r` with the tight span of the sphere.
    BallHullCheck {
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Tight span of a finite metric file.
    Hull,
    /// Common point of a family of balls.
    Hyperconvex {
        #[arg(long)]
        balls: PathBuf,
    },
    /// Sampled four-point hyperbolicity constant.
    Delta {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Recover the antipodal function from sphere points.
    VisualCheck {
        #[arg(long, allow_hyphen_values = true)]
        r: String,
    },
    /// Moebius classes.
    Teich(TeichArgs),
    /// Run the acceptance suite.
    Selfcheck,
}

#[derive(Args, Debug)]
pub struct TeichArgs {
    /// Use the class with these simplex coordinates instead of the input file.
    #[arg(long, global = true)]
    pub simplex: Option<String>,
    #[command(subcommand)]
    pub op: TeichOp,
}

#[derive(Subcommand, Debug)]
pub enum TeichOp {
    Normalize,
    Phi,
    Dist {
        #[arg(long)]
        other: PathBuf,
    },
    Geodesic {
        #[arg(long)]
        other: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
    Classify4,
    Symmetries,
    Fingerprint,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
    /// A check ran to completion and failed; the report is the output.
    #[error("check failed")]
    CheckFailed(String),
}

fn core_code(e: &Error) -> i32 {
    match e {
        Error::LimitExceeded(_) => EXIT_LIMIT,
        Error::CounterexampleFound(_) | Error::InvariantViolation(_) => EXIT_INTERNAL,
        Error::NotMember
        | Error::RadiusTooSmall { .. }
        | Error::PreconditionViolated(_)
        | Error::SameClass
        | Error::NotMoebiusEquivalent(..) => EXIT_PRECONDITION,
        _ => EXIT_INPUT,
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) | CliError::Format(FormatError::Core(e)) => core_code(e),
            CliError::Format(_) | CliError::Io(_) | CliError::Usage(_) => EXIT_INPUT,
            CliError::CheckFailed(_) => EXIT_INTERNAL,
        }
    }

    /// Variant name of the underlying error.
    pub fn kind(&self) -> String {
        let name = |d: String| d.split(['(', ' ', '{']).next().unwrap_or_default().to_string();
        match self {
            CliError::Core(e) | CliError::Format(FormatError::Core(e)) => name(format!("{e:?}")),
            CliError::Format(FormatError::SchemaMismatch { .. }) => "SchemaMismatch".into(),
            CliError::Format(FormatError::Parse(_)) => "ParseError".into(),
            CliError::Io(_) => "IoError".into(),
            CliError::Usage(_) => "UsageError".into(),
            CliError::CheckFailed(_) => "CheckFailed".into(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

struct Context {
    tol: Tolerance,
    max_n: usize,
    format: OutputFormat,
    input: Option<PathBuf>,
}

impl Context {
    fn options(&self) -> Options {
        Options { max_n: self.max_n, ..Options::default() }
    }

    fn read_input(&self) -> CliResult<String> {
        match &self.input {
            Some(p) => read_file(p),
            None => {
                let mut s = String::new();
                std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Io(format!("stdin: {e}")))?;
                Ok(s)
            }
        }
    }

    fn space(&self) -> CliResult<ParsedSpace> {
        let s = parse_space(&self.read_input()?, self.tol)?;
        if s.n() > self.max_n {
            return Err(Error::LimitExceeded(format!("n = {} exceeds max_n = {}", s.n(), self.max_n)).into());
        }
        Ok(s)
    }
}

fn read_file(p: &PathBuf) -> CliResult<String> {
    std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

fn emit_vec<S: Num>(v: &[S]) -> Vec<String> {
    v.iter().map(Num::emit).collect()
}

fn emit_rho<S: Num>(rho: &SeparatingMatrix<S>) -> Vec<Vec<String>> {
    let n = rho.n();
    (0..n).map(|i| (0..n).map(|j| rho.get(i, j).emit()).collect()).collect()
}

fn complex_output<S: Num>(c: &Complex<S>, ctx: &Context) -> String {
    match ctx.format {
        OutputFormat::Json => to_json(&ComplexFile::from_complex(c)),
        OutputFormat::Dot => hasse_dot(c),
    }
}

/// Commands that work on the Moebius complex, in the scalar type of the input.
fn moebius_command<S: Num>(space: &LogSpace<S>, cmd: &Command, ctx: &Context) -> CliResult<String> {
    let build = || build_complex(space, ctx.options());
    let one = |text: &str| -> CliResult<S> { Ok(S::parse_text(text)?) };
    Ok(match cmd {
        Command::Complex { strategy } => {
            let strategy = match strategy {
                StrategyArg::VertexFirst => Strategy::VertexFirst,
                StrategyArg::SubsetWalk => Strategy::SubsetWalk,
            };
            complex_output(&build_complex(space, Options { strategy, ..ctx.options() })?, ctx)
        }
        Command::Rays => {
            let c = build()?;
            let rays: Vec<Value> = c
                .rays()
                .filter_map(|cell| cell.ray.as_ref().map(|r| (cell, r)))
                .map(|(cell, r)| {
                    json!({
                        "id": cell.id,
                        "center": r.center,
                        "label": space.labels()[r.center],
                        "relation": relation_pairs(&cell.relation),
                        "t_min": r.t_min.emit(),
                        "endpoint": emit_vec(&c.cell(r.endpoint).witness.0),
                        "direction": emit_vec(&r.direction),
                    })
                })
                .collect();
            pretty(&json!({ "rays": rays }))
        }
        Command::Membership { tau } => {
            let tau = MoebiusVector(parse_list::<S>(tau)?);
            let member = space.is_member(&tau)?;
            let mut out = json!({
                "member": member,
                "discrepancy": emit_vec(&space.discrepancy(&tau)?),
            });
            if member {
                out["relation"] = json!(relation_pairs(&relation_of_point(space, &tau)?));
                out["tangent_dimension"] = json!(tangent_dimension(space, &tau)?);
            }
            pretty(&out)
        }
        Command::Sphere { r } => {
            let s = sphere_points(&build()?, &one(r)?)?;
            let d = s.distances();
            let n = s.points.len();
            pretty(&json!({
                "r": s.r.emit(),
                "r_tilde": s.r_tilde.emit(),
                "points": s.points.iter().map(|p| emit_vec(&p.0)).collect::<Vec<_>>(),
                "distances": (0..n).map(|i| (0..n).map(|j| d.get(i, j).emit()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            }))
        }
        Command::BallHullCheck { r, samples, seed } => {
            let rep = ball_hull_check(&build()?, &one(r)?, *samples, *seed)?;
            let body = pretty(&json!({
                "r": rep.r,
                "passed": rep.ok(),
                "tight_span_vertices": rep.vertices,
                "samples": rep.samples,
                "rejected": rep.rejected,
                "max_deviation": rep.max_deviation,
                "failures": rep.failures,
            }));
            if !rep.ok() {
                return Err(CliError::CheckFailed(body));
            }
            body
        }
        Command::Hyperconvex { balls } => {
            let (centers, radii) = parse_balls::<S>(&read_file(balls)?)?;
            let w = hyperconvexity_witness(&build()?, &centers, &radii)?;
            pretty(&json!({ "witness": emit_vec(&w.0) }))
        }
        Command::Delta { samples, seed } => {
            let rep = delta_estimate(&build()?, *samples, *seed)?;
            pretty(&json!({ "delta": rep.delta, "quadruples": rep.quadruples, "violations": rep.violations }))
        }
        Command::VisualCheck { r } => {
            let rep = visual_recovery_check(&build()?, &one(r)?)?;
            let n = space.n();
            pretty(&json!({
                "r": rep.r.emit(),
                "products": (0..n).map(|i| (0..n).map(|j| rep.products.get(i, j).emit()).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "max_deviation": rep.max_deviation,
                "mismatches": rep.mismatches,
            }))
        }
        _ => unreachable!("dispatched elsewhere"),
    })
}

fn hull_command(ctx: &Context) -> CliResult<String> {
    fn go<S: Num>(m: &moebius_core::hull::FiniteMetric<S>, ctx: &Context) -> CliResult<String> {
        let ts = tight_span(m, ctx.options())?;
        Ok(match ctx.format {
            OutputFormat::Json => to_json(&ComplexFile::from_tight_span(&ts)),
            OutputFormat::Dot => hasse_dot(ts.complex()),
        })
    }
    match parse_metric(&ctx.read_input()?, ctx.tol)? {
        ParsedMetric::Exact(m) => go(&m, ctx),
        ParsedMetric::Float(m) => go(&m, ctx),
    }
}

/// The class a teich command works on, exact when the input allows it.
enum ClassInput {
    Exact(SeparatingMatrix<Rational>),
    Float(SeparatingMatrix<f64>),
}

fn simplex_class(text: &str, tol: Tolerance) -> CliResult<ClassInput> {
    if let Ok(c) = parse_list::<Rational>(text) {
        return Ok(ClassInput::Exact(phi_inverse(&SimplexPoint::new(c, tol)?)?.rho().clone()));
    }
    let c = parse_list::<f64>(text)?;
    Ok(ClassInput::Float(phi_inverse(&SimplexPoint::new(c, tol)?)?.rho().clone()))
}

fn class_of(space: &ParsedSpace) -> ClassInput {
    match space.rho_exact() {
        Some(r) => ClassInput::Exact(r.clone()),
        None => ClassInput::Float(space.rho_f64()),
    }
}

fn normalized_json<S: Num>(n: &NormalizedAntipodal<S>) -> CliResult<Value> {
    Ok(json!({ "rho": emit_rho(n.rho()), "coordinates": emit_vec(phi(n.rho())?.coords()) }))
}

fn region_json<S: Num>(r: &Region4<S>) -> Value {
    json!({ "region": r.tag.name(), "sides": emit_vec(&r.sides) })
}

fn teich_command(args: &TeichArgs, ctx: &Context) -> CliResult<String> {
    let space = match &args.simplex {
        Some(_) => None,
        None => Some(ctx.space()?),
    };
    let class = match (&args.simplex, &space) {
        (Some(t), _) => simplex_class(t, ctx.tol)?,
        (None, Some(s)) => class_of(s),
        (None, None) => unreachable!("one input is present"),
    };
    let other = |p: &PathBuf| -> CliResult<ClassInput> { Ok(class_of(&parse_space(&read_file(p)?, ctx.tol)?)) };
    let value = match &args.op {
        TeichOp::Normalize => match &class {
            ClassInput::Exact(r) => normalized_json(&normalize(r)?)?,
            ClassInput::Float(r) => normalized_json(&normalize(r)?)?,
        },
        TeichOp::Phi => match &class {
            ClassInput::Exact(r) => json!({ "coordinates": emit_vec(phi(r)?.coords()) }),
            ClassInput::Float(r) => json!({ "coordinates": emit_vec(phi(r)?.coords()) }),
        },
        TeichOp::Dist { other: p } => {
            let d = match (&class, other(p)?) {
                (ClassInput::Exact(a), ClassInput::Exact(b)) => d_moeb(a, &b)?,
                (a, b) => d_moeb(&float_rho(a), &float_rho(&b))?,
            };
            json!({ "distance": d.emit() })
        }
        TeichOp::Geodesic { other: p, t } => {
            let b = other(p)?;
            let g = geodesic_point(&float_rho(&class), &float_rho(&b), *t, ctx.tol)?;
            let mut v = normalized_json(&g)?;
            v["t"] = json!(t.emit());
            v
        }
        TeichOp::Classify4 => match (space.as_ref().and_then(|s| s.log_exact()), &class) {
            (Some(log), _) => region_json(&classify4_log(log)?),
            (None, ClassInput::Exact(r)) => region_json(&classify4(r, ctx.tol)?),
            (None, ClassInput::Float(r)) => region_json(&classify4(r, ctx.tol)?),
        },
        TeichOp::Symmetries => {
            let g = match &class {
                ClassInput::Exact(r) => moebius_symmetries(r, ctx.tol)?,
                ClassInput::Float(r) => moebius_symmetries(r, ctx.tol)?,
            };
            json!({ "order": g.order(), "elements": g.elements })
        }
        TeichOp::Fingerprint => {
            let fp = match space.as_ref().and_then(|s| s.log_exact()) {
                Some(log) => lattice_fingerprint(&build_complex(log, ctx.options())?),
                None => {
                    let log = match (&space, &class) {
                        (Some(s), _) => s.log_f64(),
                        (None, c) => {
                            moebius_core::AntipodalSpace::from_rows(rows_of(&normalize(&float_rho(c))?.rho().clone()), ctx.tol)?
                                .to_log_weights()
                        }
                    };
                    lattice_fingerprint(&build_complex(&log, ctx.options())?)
                }
            };
            json!({ "fingerprint": fp })
        }
    };
    Ok(pretty(&value))
}

fn rows_of(rho: &SeparatingMatrix<f64>) -> Vec<Vec<f64>> {
    let n = rho.n();
    (0..n).map(|i| (0..n).map(|j| *rho.get(i, j)).collect()).collect()
}

fn float_rho(c: &ClassInput) -> SeparatingMatrix<f64> {
    match c {
        ClassInput::Exact(r) => r.to_f64(),
        ClassInput::Float(r) => r.clone(),
    }
}

fn dispatch(cli: &Cli, ctx: &Context) -> CliResult<String> {
    match &cli.command {
        Command::Validate => {
            let s = ctx.space()?;
            let (domain, mode) = match &s {
                ParsedSpace::RhoExact(_) => ("rho", "exact"),
                ParsedSpace::RhoFloat(_) => ("rho", "float"),
                ParsedSpace::LogExact(_) => ("log", "exact"),
                ParsedSpace::LogFloat(_) => ("log", "float"),
            };
            Ok(pretty(&json!({ "valid": true, "n": s.n(), "domain": domain, "mode": mode })))
        }
        Command::Hull => hull_command(ctx),
        Command::Teich(args) => teich_command(args, ctx),
        Command::Selfcheck => {
            let report = acceptance::run_all();
            let body = pretty(&acceptance::report_json(&report));
            if report.iter().all(|r| r.passed) {
                Ok(body)
            } else {
                Err(CliError::CheckFailed(body))
            }
        }
        cmd => {
            let s = ctx.space()?;
            match s.log_exact() {
                Some(log) => moebius_command(log, cmd, ctx),
                None => moebius_command(&s.log_f64(), cmd, ctx),
            }
        }
    }
}

fn write_output(path: &Option<PathBuf>, body: &str) -> CliResult<()> {
    let text = if body.ends_with('\n') { body.to_string() } else { format!("{body}\n") };
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

/// Run with the given arguments (including the program name) and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let max_n = match std::env::var(MAX_N_ENV) {
        Ok(v) => match v.trim().parse() {
            Ok(n) => n,
            Err(_) => return report_error(&CliError::Usage(format!("{MAX_N_ENV} is not a number: {v:?}"))),
        },
        Err(_) => cli.max_n,
    };
    let ctx = Context { tol: Tolerance::new(cli.tol), max_n, format: cli.format, input: cli.input.clone() };
    match dispatch(&cli, &ctx) {
        Ok(body) => match write_output(&cli.output, &body) {
            Ok(()) => EXIT_OK,
            Err(e) => report_error(&e),
        },
        Err(CliError::CheckFailed(body)) => {
            let _ = write_output(&cli.output, &body);
            EXIT_INTERNAL
        }
        Err(e) => report_error(&e),
    }
}

fn report_error(e: &CliError) -> i32 {
    let v = json!({ "error": e.kind(), "message": e.to_string() });
    eprintln!("{}", pretty(&v));
    e.exit_code()
}
