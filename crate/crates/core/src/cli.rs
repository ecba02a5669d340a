//! The `moment-gibbs` command-line front end.
//!
//! Every subcommand reads a state set (JSON file path, or `-` for stdin) and
//! produces a [`CommandResult`]. [`run`] never touches the process; the thin
//! binary prints the payload to stdout, diagnostics to stderr, and exits with
//! [`CommandResult::exit_code`].
//!
//! Exit codes: `0` success, `1` a `check` tolerance was exceeded, `2` invalid
//! input, `3` infeasible target, `4` no convergence.
//!
//! ```
//! use moment_gibbs::cli::{run, Payload};
//!
//! let input = r#"{"dim": 1, "points": [[0], [1]]}"#;
//! let out = run(["moment-gibbs", "forward", "-", "--beta", "0"], &mut input.as_bytes());
//! assert_eq!(out.exit_code, 0);
//! let Payload::Json(doc) = &out.payload else { panic!() };
//! assert_eq!(doc["probs"][0].to_string(), "0.5");
//! ```

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Read;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use nalgebra::DMatrix;
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use serde_json::{json, Map, Number, Value};

use crate::gibbs::{self, Distribution};
use crate::{duality, microstates, moment_solver, polytope, toric};
use crate::{CoVector, Error, SolveOptions, StateSet};

pub const SCHEMA: &str = "moment-gibbs/v1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_NO_CONVERGENCE: i32 = 4;

/// Tolerance on `|S − (β, Ē) − log Z|` used by `check`.
pub const CHECK_LEGENDRE_TOL: f64 = 1e-10;
/// Tolerance on the re-solved mean, relative to the hull diameter, used by `check`.
pub const CHECK_ROUNDTRIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Json(Value),
    /// CSV tables and help text.
    Text(String),
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub payload: Payload,
    pub diagnostics: Vec<String>,
}

impl CommandResult {
    /// The bytes written to stdout.
    pub fn stdout(&self) -> String {
        match &self.payload {
            Payload::Json(v) => {
                let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
                s.push('\n');
                s
            }
            Payload::Text(s) => s.clone(),
            Payload::None => String::new(),
        }
    }

    /// The bytes written to stderr.
    pub fn stderr(&self) -> String {
        self.diagnostics.iter().map(|d| format!("{d}\n")).collect()
    }
}

#[derive(Debug, Parser)]
#[command(name = "moment-gibbs", version, about = "Vector-valued Gibbs thermodynamics on a finite state set")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// log Z, Gibbs distribution, mean energy, covariance and entropy at β.
    Forward {
        /// State set JSON file, or `-` for stdin.
        input: String,
        /// Comma-separated β.
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
    },
    /// Solve ⟨E⟩(β) = Ē for β.
    Invert {
        input: String,
        /// Comma-separated target mean energy Ē.
        #[arg(long, allow_hyphen_values = true)]
        mean: String,
        /// Gradient tolerance, relative to the hull diameter.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// CSV of mean energy, entropy and log Z along one β axis.
    Sweep {
        input: String,
        #[arg(long)]
        axis: usize,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
        /// β values for the other axes, in order; zeros when omitted.
        #[arg(long, allow_hyphen_values = true)]
        fixed: Option<String>,
    },
    /// Vertices, facets and affine span of Conv(A).
    Hull { input: String },
    /// Face of Conv(A) minimizing a direction, and the low-temperature limit along it.
    Limit {
        input: String,
        #[arg(long, allow_hyphen_values = true)]
        direction: String,
    },
    /// Multinomial particle counts and equilibrium-microstate counts.
    Microstates {
        input: String,
        #[arg(long)]
        total: u64,
        #[arg(long)]
        seed: u64,
        /// Draw from the Gibbs distribution at this β (default 0).
        #[arg(long, allow_hyphen_values = true, conflicts_with = "probs")]
        beta: Option<String>,
        /// Draw from this distribution over the states instead.
        #[arg(long)]
        probs: Option<String>,
    },
    /// Positive toric point at β (max-normalized amplitudes) and its moment image ⟨E⟩(2β).
    Toric {
        input: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
    },
    /// Legendre residuals and solver round trips on a seeded β grid.
    Check {
        input: String,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Half-width of the β box.
        #[arg(long, default_value_t = 5.0)]
        radius: f64,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli.command, stdin),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                CommandResult { exit_code: EXIT_INVALID, payload: Payload::None, diagnostics: vec![text.trim_end().to_owned()] }
            } else {
                CommandResult { exit_code: EXIT_OK, payload: Payload::Text(text), diagnostics: Vec::new() }
            }
        }
    }
}

/// Runs an already-parsed command.
pub fn execute(command: Command, stdin: &mut dyn Read) -> CommandResult {
    let mut out = Emitter::default();
    let name = command_name(&command);
    let payload = match dispatch(command, stdin, &mut out) {
        Ok(body) => body,
        Err(failure) => return failure.into_result(name, out),
    };
    let exit_code = out.exit_code;
    CommandResult { exit_code, payload: out.finish(name, payload), diagnostics: out.diagnostics }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Forward { .. } => "forward",
        Command::Invert { .. } => "invert",
        Command::Sweep { .. } => "sweep",
        Command::Hull { .. } => "hull",
        Command::Limit { .. } => "limit",
        Command::Microstates { .. } => "microstates",
        Command::Toric { .. } => "toric",
        Command::Check { .. } => "check",
    }
}

enum Body {
    Json(Map<String, Value>),
    Csv(String),
}

struct Failure {
    error: Error,
    context: Option<Map<String, Value>>,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure { error, context: None }
    }
}

impl Failure {
    fn into_result(self, name: &'static str, mut out: Emitter) -> CommandResult {
        let exit_code = exit_code_for(&self.error);
        out.diagnostics.push(format!("error: {}", self.error));
        let payload = match (exit_code, self.context) {
            (EXIT_INFEASIBLE | EXIT_NO_CONVERGENCE, ctx) => {
                let mut doc = ctx.unwrap_or_default();
                doc.insert("error".into(), Value::String(self.error.to_string()));
                out.finish(name, Body::Json(doc))
            }
            _ => Payload::None,
        };
        CommandResult { exit_code, payload, diagnostics: out.diagnostics }
    }
}

/// Maps a library error to its exit code.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::TargetOutsideHull { .. } | Error::TargetOnBoundary { .. } => EXIT_INFEASIBLE,
        Error::NoConvergence(_) => EXIT_NO_CONVERGENCE,
        _ => EXIT_INVALID,
    }
}

#[derive(Default)]
struct Emitter {
    diagnostics: Vec<String>,
    exit_code: i32,
}

impl Emitter {
    fn num(&mut self, field: &str, x: f64) -> Value {
        if x.is_finite() {
            Value::Number(Number::from_str(&g17(x)).expect("g17 output is a JSON number"))
        } else {
            self.diagnostics.push(format!("warning: {field} is {x}, written as null"));
            Value::Null
        }
    }

    fn vec(&mut self, field: &str, xs: &[f64]) -> Value {
        Value::Array(xs.iter().map(|&x| self.num(field, x)).collect())
    }

    fn mat(&mut self, field: &str, m: &DMatrix<f64>) -> Value {
        Value::Array(
            m.row_iter()
                .map(|r| r.iter().map(|&x| self.num(field, x)).collect::<Vec<_>>().into())
                .collect(),
        )
    }

    fn finish(&mut self, name: &str, body: Body) -> Payload {
        match body {
            Body::Json(mut doc) => {
                doc.insert("schema".into(), SCHEMA.into());
                doc.insert("command".into(), name.into());
                Payload::Json(Value::Object(doc))
            }
            Body::Csv(text) => Payload::Text(text),
        }
    }
}

fn dispatch(command: Command, stdin: &mut dyn Read, out: &mut Emitter) -> Result<Body, Failure> {
    match command {
        Command::Forward { input, beta } => {
            let a = load(&input, stdin)?;
            let beta = parse_covector(&a, "beta", &beta)?;
            let s = gibbs::gibbs_summary(&a, &beta)?;
            let mut doc = Map::new();
            doc.insert("log_z".into(), out.num("log_z", s.log_z));
            doc.insert("probs".into(), out.vec("probs", s.distribution.probs()));
            doc.insert("mean".into(), out.vec("mean", &s.mean_energy));
            doc.insert("covariance".into(), out.mat("covariance", &s.covariance));
            doc.insert("entropy".into(), out.num("entropy", s.entropy));
            Ok(Body::Json(doc))
        }
        Command::Invert { input, mean, tol, max_iter } => {
            let a = load(&input, stdin)?;
            let target = parse_list("mean", &mean)?;
            let mut opts = SolveOptions::default();
            if let Some(t) = tol {
                opts.grad_tol = t;
            }
            if let Some(m) = max_iter {
                opts.max_iter = m;
            }
            let report = match moment_solver::invert_mean_energy(&a, &target, &opts) {
                Ok(r) => r,
                Err(error) => {
                    let mut ctx = Map::new();
                    match &error {
                        Error::TargetOutsideHull { margin } | Error::TargetOnBoundary { margin } => {
                            ctx.insert("margin".into(), out.num("margin", *margin));
                        }
                        Error::NoConvergence(r) => {
                            ctx.insert("beta".into(), out.vec("beta", r.beta.components()));
                            ctx.insert("iterations".into(), r.iterations.into());
                            ctx.insert("grad_norm".into(), out.num("grad_norm", r.grad_norm));
                        }
                        _ => {}
                    }
                    return Err(Failure { error, context: Some(ctx) });
                }
            };
            let mut doc = Map::new();
            doc.insert("beta".into(), out.vec("beta", report.beta.components()));
            doc.insert("iterations".into(), report.iterations.into());
            doc.insert("grad_norm".into(), out.num("grad_norm", report.grad_norm));
            doc.insert("entropy".into(), out.num("entropy", report.entropy));
            doc.insert("reduced".into(), report.reduced.into());
            Ok(Body::Json(doc))
        }
        Command::Sweep { input, axis, from, to, steps, fixed } => {
            let a = load(&input, stdin)?;
            Ok(Body::Csv(sweep(&a, axis, from, to, steps, fixed.as_deref())?))
        }
        Command::Hull { input } => {
            let a = load(&input, stdin)?;
            let q = polytope::convex_hull(&a)?;
            let facets: Vec<Value> = q
                .facets
                .iter()
                .map(|f| {
                    json!({
                        "normal": out.vec("normal", f.normal.components()),
                        "offset": out.num("offset", f.offset),
                        "vertices": f.vertices,
                    })
                })
                .collect();
            let span: Vec<Value> = q
                .span_equations
                .iter()
                .map(|e| json!({"normal": out.vec("normal", e.normal.components()), "value": out.num("value", e.value)}))
                .collect();
            let mut doc = Map::new();
            doc.insert("vertices".into(), q.vertices.clone().into());
            doc.insert("facets".into(), facets.into());
            doc.insert("affine_dim".into(), q.affine_dim.into());
            doc.insert("span_equations".into(), span.into());
            doc.insert("diameter".into(), out.num("diameter", q.diameter));
            Ok(Body::Json(doc))
        }
        Command::Limit { input, direction } => {
            let a = load(&input, stdin)?;
            let d = parse_covector(&a, "direction", &direction)?;
            let face = polytope::min_face(&a, &d)?;
            let limit = polytope::tropical_limit(&a, &d)?;
            let mut doc = Map::new();
            doc.insert("face".into(), face.indices.into());
            doc.insert("value".into(), out.num("value", face.value));
            doc.insert("limit".into(), out.vec("limit", &limit));
            Ok(Body::Json(doc))
        }
        Command::Microstates { input, total, seed, beta, probs } => {
            let a = load(&input, stdin)?;
            let p = match probs {
                Some(text) => {
                    let p = parse_list("probs", &text)?;
                    if p.len() != a.len() {
                        return Err(Error::LengthMismatch { expected: a.len(), found: p.len() }.into());
                    }
                    Distribution::new(p)?
                }
                None => {
                    let beta = match beta {
                        Some(text) => parse_covector(&a, "beta", &text)?,
                        None => CoVector::zeros(a.dim()),
                    };
                    gibbs::gibbs_distribution(&a, &beta)?
                }
            };
            let counts = microstates::sample_counts(&p, total, seed)?;
            let empirical = microstates::empirical_distribution(&counts);
            let log_count = microstates::log_equilibrium_count(&p, total)?;
            let log_measure = microstates::log_multinomial_measure(&p, &counts)?;
            let mut doc = Map::new();
            doc.insert("generator".into(), microstates::GENERATOR.into());
            doc.insert("seed".into(), seed.into());
            doc.insert("total".into(), total.into());
            doc.insert("probs".into(), out.vec("probs", p.probs()));
            doc.insert("counts".into(), counts.counts.clone().into());
            doc.insert("empirical".into(), out.vec("empirical", empirical.probs()));
            doc.insert("log_measure".into(), out.num("log_measure", log_measure));
            doc.insert("log_equilibrium_count".into(), out.num("log_equilibrium_count", log_count));
            doc.insert("per_particle".into(), out.num("per_particle", log_count / total as f64));
            doc.insert("entropy".into(), out.num("entropy", gibbs::entropy(&p)));
            Ok(Body::Json(doc))
        }
        Command::Toric { input, beta } => {
            let a = load(&input, stdin)?;
            let beta = parse_covector(&a, "beta", &beta)?;
            let x = toric::positive_point(&a, &beta)?;
            let moment = toric::moment_of_beta(&a, &beta)?;
            let mut doc = Map::new();
            doc.insert("positive_point".into(), out.vec("positive_point", x.weights()));
            doc.insert("moment".into(), out.vec("moment", &moment));
            Ok(Body::Json(doc))
        }
        Command::Check { input, points, seed, radius } => {
            let a = load(&input, stdin)?;
            check(&a, points, seed, radius, out)
        }
    }
}

fn load(input: &str, stdin: &mut dyn Read) -> Result<StateSet, Failure> {
    let mut text = String::new();
    let read = if input == "-" {
        stdin.read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(input).map(|t| text = t)
    };
    read.map_err(|e| Error::InvalidInput(format!("cannot read {input}: {e}")))?;
    Ok(StateSet::from_json(&text)?)
}

fn parse_list(field: &str, text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            match s.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => Err(Error::InvalidInput(format!("{field}: `{s}` is not a finite number")).into()),
            }
        })
        .collect()
}

fn parse_covector(a: &StateSet, field: &str, text: &str) -> Result<CoVector, Failure> {
    let xs = parse_list(field, text)?;
    if xs.len() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: xs.len() }.into());
    }
    Ok(CoVector::new(xs))
}

fn sweep(a: &StateSet, axis: usize, from: f64, to: f64, steps: usize, fixed: Option<&str>) -> Result<String, Failure> {
    let n = a.dim();
    if axis >= n {
        return Err(Error::InvalidInput(format!("axis {axis} out of range for dimension {n}")).into());
    }
    if steps < 2 {
        return Err(Error::InvalidInput(format!("steps must be at least 2, got {steps}")).into());
    }
    if !(from.is_finite() && to.is_finite() && from < to) {
        return Err(Error::InvalidInput(format!("bad range {from}..{to}")).into());
    }
    let others = match fixed {
        Some(text) => parse_list("fixed", text)?,
        None => vec![0.0; n - 1],
    };
    if others.len() != n - 1 {
        return Err(Error::LengthMismatch { expected: n - 1, found: others.len() }.into());
    }

    let mut csv = String::from("beta_axis");
    for i in 1..=n {
        write!(csv, ",mean_{i}").unwrap();
    }
    csv.push_str(",entropy,log_z\n");
    let mut beta = others;
    beta.insert(axis, 0.0);
    for k in 0..steps {
        let t = if k + 1 == steps { to } else { from + (to - from) * k as f64 / (steps - 1) as f64 };
        beta[axis] = t;
        let s = gibbs::gibbs_summary(a, &CoVector::new(beta.clone()))?;
        csv.push_str(&g17(t));
        for m in &s.mean_energy {
            csv.push(',');
            csv.push_str(&g17(*m));
        }
        writeln!(csv, ",{},{}", g17(s.entropy), g17(s.log_z)).unwrap();
    }
    Ok(csv)
}

fn check(a: &StateSet, points: usize, seed: u64, radius: f64, out: &mut Emitter) -> Result<Body, Failure> {
    if points == 0 || !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidInput("check needs points >= 1 and a positive radius".into()).into());
    }
    let n = a.dim();
    let scale = if a.diameter() > 0.0 { a.diameter() } else { 1.0 };
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut uniform = || (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);

    let mut worst_residual = 0.0f64;
    let mut worst_roundtrip = 0.0f64;
    let mut failed_solves = 0usize;
    let opts = SolveOptions::default();
    for _ in 0..points {
        let beta = CoVector::new((0..n).map(|_| radius * (2.0 * uniform() - 1.0)).collect());
        worst_residual = worst_residual.max(duality::legendre_residual(a, &beta)?.abs());
        if a.affine_dim() == 0 {
            continue;
        }
        let mean = gibbs::mean_energy(a, &beta)?;
        match duality::legendre_roundtrip(a, &mean, &opts) {
            Ok(err) => worst_roundtrip = worst_roundtrip.max(err / scale),
            Err(e) => {
                failed_solves += 1;
                out.diagnostics.push(format!("warning: round trip at beta {:?} failed: {e}", beta.components()));
            }
        }
    }
    let passed = worst_residual <= CHECK_LEGENDRE_TOL && worst_roundtrip <= CHECK_ROUNDTRIP_TOL && failed_solves == 0;
    if !passed {
        out.exit_code = EXIT_CHECK_FAILED;
        out.diagnostics.push("check failed: a residual exceeds its tolerance".into());
    }
    let mut doc = Map::new();
    doc.insert("points".into(), points.into());
    doc.insert("seed".into(), seed.into());
    doc.insert("radius".into(), out.num("radius", radius));
    doc.insert("max_legendre_residual".into(), out.num("max_legendre_residual", worst_residual));
    doc.insert("legendre_tol".into(), out.num("legendre_tol", CHECK_LEGENDRE_TOL));
    doc.insert("max_roundtrip_error".into(), out.num("max_roundtrip_error", worst_roundtrip));
    doc.insert("roundtrip_tol".into(), out.num("roundtrip_tol", CHECK_ROUNDTRIP_TOL));
    doc.insert("failed_solves".into(), failed_solves.into());
    doc.insert("passed".into(), passed.into());
    Ok(Body::Json(doc))
}

/// Formats like C's `%.17g`: enough digits to round-trip any double.
pub fn g17(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let fixed = format!("{:.*}", (16 - exp) as usize, x);
        trim_fraction(&fixed).to_owned()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_fraction(mantissa), sign, exp.abs())
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
