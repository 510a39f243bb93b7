//! The `hre` command-line tool.
//!
//! Every subcommand writes deterministic output: identical arguments give
//! byte-identical text, CSV or JSON. JSON documents follow the schema in
//! `schema/hre-output.v1.schema.json`.
//!
//! Exit status is 0 on success, 2 on invalid arguments or a failed
//! computation, and 1 when a `certify` run is not certified or a
//! `verify-map --expect clean` run finds a counterexample.

use std::ffi::OsString;
use std::io::{self, Write};
use std::ops::RangeInclusive;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use hre_core::bounds::{self, BoundError, BoundReport, TableCell, Tightness};
use hre_core::charclass::{self, Certificate, ClassError, FactorCertificate, Limits};
use hre_core::dickson::{self, DicksonError};
use hre_core::gf2poly::DEFAULT_MAX_TERMS;
use hre_core::regcheck::{self, Arithmetic, MapFamily, RegError, RegularityReport, Sampler};

pub const SCHEMA_VERSION: u64 = 1;
pub const MAX_TERMS_ENV: &str = "HRE_MAX_TERMS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Dickson(#[from] DicksonError),
    #[error(transparent)]
    Reg(#[from] RegError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Parser)]
#[command(
    name = "hre",
    version,
    about = "Lower bounds and obstruction certificates for highly regular embeddings"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the closed-form lower bounds for one problem.
    Bound(BoundArgs),
    /// Reproduce the comparison table of skew-embedding bounds.
    Table(TableArgs),
    /// Certify non-vanishing of the obstructing dual Stiefel-Whitney class.
    Certify(CertifyArgs),
    /// Build the Dickson invariants of rank m from the additive polynomial.
    Dickson(DicksonArgs),
    /// Sample configurations and test an explicit map for k-regularity.
    VerifyMap(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProblemKind {
    Regular,
    Skew,
    RegularSkew,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ArithmeticMode {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Expectation {
    Clean,
}

#[derive(Debug, Args)]
struct Dims {
    /// Dimension of the domain R^d.
    #[arg(long)]
    d: u64,
    /// Number of points that must map to independent vectors.
    #[arg(long)]
    k: Option<u64>,
    /// Number of tangent spaces that must be skew.
    #[arg(long)]
    l: Option<u64>,
}

#[derive(Debug, Args)]
struct BoundArgs {
    #[arg(value_enum)]
    kind: ProblemKind,
    #[command(flatten)]
    dims: Dims,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Debug, Args)]
struct TableArgs {
    /// Comma-separated values of l.
    #[arg(long, value_delimiter = ',', required = true)]
    l: Vec<u64>,
    /// Inclusive range `a..b` of dimensions, or a single value.
    #[arg(long, value_parser = parse_range)]
    d: RangeInclusive<u64>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    #[arg(value_enum)]
    kind: ProblemKind,
    #[command(flatten)]
    dims: Dims,
    /// Include the per-factor derivation.
    #[arg(long)]
    trace: bool,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Debug, Args)]
struct DicksonArgs {
    #[arg(long)]
    m: usize,
    /// Check invariance under every matrix of GL_m(F_2).
    #[arg(long)]
    verify: bool,
    /// Allow the 20160-matrix check for m = 4.
    #[arg(long)]
    long_run: bool,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// real-moment, complex-moment, sphere-lift, inverse-stereographic,
    /// identity, affine-identity or constant.
    #[arg(long)]
    family: String,
    /// Tuple size; also the size of the moment curves.
    #[arg(long)]
    k: usize,
    /// Domain dimension for the non-moment families.
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Bound on sampled numerators and denominators.
    #[arg(long, default_value_t = regcheck::DEFAULT_SAMPLE_BOUND)]
    bound: u32,
    #[arg(long, value_enum, default_value_t = ArithmeticMode::Exact)]
    arithmetic: ArithmeticMode,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    /// Test affine k-regularity through the lift x -> (1, f(x)).
    #[arg(long)]
    affine: bool,
    /// Exit with status 1 if a counterexample is found.
    #[arg(long, value_enum)]
    expect: Option<Expectation>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

fn parse_range(s: &str) -> Result<RangeInclusive<u64>, String> {
    let parse = |t: &str| {
        t.trim()
            .parse::<u64>()
            .map_err(|e| format!("invalid number `{t}`: {e}"))
    };
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok(a..=b)
}

/// Parses `argv` and runs the command, writing results to `out` and
/// diagnostics to `err`. Returns the exit status.
pub fn run<I, T, W, E>(args: I, out: &mut W, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            let mut cmd = Cli::command();
            let e = cmd.error(clap::error::ErrorKind::ValueValidation, msg);
            let _ = write!(err, "{}", e.render());
            2
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn limits() -> Result<Limits, CliError> {
    let max_terms = match std::env::var(MAX_TERMS_ENV) {
        Ok(v) => v.trim().parse::<usize>().ok().filter(|&n| n > 0).ok_or_else(|| {
            CliError::Usage(format!("{MAX_TERMS_ENV} must be a positive integer, got `{v}`"))
        })?,
        Err(_) => DEFAULT_MAX_TERMS,
    };
    Ok(Limits { max_terms })
}

fn require(name: &str, value: Option<u64>, kind: ProblemKind) -> Result<u64, CliError> {
    value.ok_or_else(|| {
        let kind = kind.to_possible_value().expect("named variant");
        CliError::Usage(format!("`{}` requires --{name}", kind.get_name()))
    })
}

fn no_csv(format: Format, command: &str) -> Result<(), CliError> {
    if format == Format::Csv {
        Err(CliError::Usage(format!(
            "csv output is only available for `table`, not `{command}`"
        )))
    } else {
        Ok(())
    }
}

fn write_json<W: Write>(out: &mut W, command: &str, body: Value) -> Result<(), CliError> {
    let mut doc = json!({ "schema_version": SCHEMA_VERSION, "command": command });
    if let (Value::Object(doc), Value::Object(body)) = (&mut doc, body) {
        doc.extend(body);
    }
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)?;
    Ok(())
}

/// The serde name of a unit enum variant.
fn tag<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::from("?"),
    }
}

fn execute<W: Write, E: Write>(command: Command, out: &mut W, err: &mut E) -> Result<i32, CliError> {
    match command {
        Command::Bound(a) => bound(a, out),
        Command::Table(a) => table(a, out, err),
        Command::Certify(a) => certify(a, out),
        Command::Dickson(a) => dickson_cmd(a, out),
        Command::VerifyMap(a) => verify_map(a, out),
    }
}

fn bound<W: Write>(a: BoundArgs, out: &mut W) -> Result<i32, CliError> {
    no_csv(a.format, "bound")?;
    let d = a.dims.d;
    let report = match a.kind {
        ProblemKind::Regular => bounds::regular_bound(d, require("k", a.dims.k, a.kind)?)?,
        ProblemKind::Skew => bounds::skew_bound(d, require("l", a.dims.l, a.kind)?)?,
        ProblemKind::RegularSkew => bounds::regular_skew_bound(
            d,
            require("k", a.dims.k, a.kind)?,
            require("l", a.dims.l, a.kind)?,
        )?,
    };
    match a.format {
        Format::Json => write_json(out, "bound", json!({ "report": report }))?,
        _ => write_bound_text(out, &report)?,
    }
    Ok(0)
}

fn problem_label(report: &BoundReport) -> String {
    use bounds::BoundProblem::*;
    match report.problem {
        Regular { k } => format!("regular (d={}, k={k})", report.d),
        Skew { l } => format!("skew (d={}, l={l})", report.d),
        RegularSkew { k, l } => format!("regular-skew (d={}, k={k}, l={l})", report.d),
    }
}

fn write_bound_text<W: Write>(out: &mut W, report: &BoundReport) -> Result<(), CliError> {
    writeln!(out, "problem: {}", problem_label(report))?;
    for e in &report.entries {
        let shift = if e.affine_shift { " (affine shift)" } else { "" };
        writeln!(
            out,
            "  {:<8} N >= {:<6} {}{shift}",
            tag(&e.formula),
            e.min_admissible_n,
            e.source
        )?;
    }
    writeln!(out, "best lower bound: N >= {}", report.best_lower)?;
    match report.tight {
        Tightness::Exact {
            n,
            construction,
            source,
            affine_shift,
        } => {
            let via = if affine_shift {
                ", leading coordinate dropped"
            } else {
                ""
            };
            writeln!(out, "tightness: EXACT at N = {n} ({}{via}; {source})", tag(&construction))?;
        }
        Tightness::Unknown => writeln!(out, "tightness: UNKNOWN")?,
    }
    Ok(())
}

fn table<W: Write, E: Write>(a: TableArgs, out: &mut W, err: &mut E) -> Result<i32, CliError> {
    let ds: Vec<u64> = a.d.clone().collect();
    let cells = bounds::paper_table(&a.l, &ds)?;
    match a.format {
        Format::Csv => {
            write!(out, "{}", bounds::table_csv(&cells))?;
            for line in discrepancy_lines(&cells) {
                writeln!(err, "note: {line}")?;
            }
        }
        Format::Json => write_json(out, "table", json!({ "cells": cells }))?,
        Format::Text => write_table_text(out, &a.l, &ds, &cells)?,
    }
    Ok(0)
}

fn discrepancy_lines(cells: &[TableCell]) -> Vec<String> {
    cells
        .iter()
        .flat_map(|c| {
            c.paper_discrepancy.iter().map(move |p| {
                format!(
                    "paper_discrepancy at l={} d={} row {}: printed {}, computed {}",
                    c.l, c.d, p.row, p.printed, p.computed
                )
            })
        })
        .collect()
}

fn write_table_text<W: Write>(
    out: &mut W,
    ls: &[u64],
    ds: &[u64],
    cells: &[TableCell],
) -> Result<(), CliError> {
    let mut header = format!("{:<4}{:<12}", "l", "bound");
    for d in ds {
        header.push_str(&format!("{:>7}", format!("d={d}")));
    }
    writeln!(out, "{}", header.trim_end())?;
    for &l in ls {
        for (row, label) in [("main2", "MAIN2"), ("stojanovic", "Stojanovic")] {
            let mut line = format!("{:<4}{:<12}", l, label);
            for &d in ds {
                let cell = cells
                    .iter()
                    .find(|c| c.l == l && c.d == d)
                    .expect("cell for every (l, d)");
                let value = if row == "main2" { cell.main2 } else { cell.stojanovic };
                let mark = if cell.paper_discrepancy.iter().any(|p| p.row == row) {
                    "*"
                } else {
                    " "
                };
                line.push_str(&format!("{:>6}{mark}", value));
            }
            writeln!(out, "{}", line.trim_end())?;
        }
    }
    for line in discrepancy_lines(cells) {
        writeln!(out, "* {line}")?;
    }
    Ok(())
}

fn factor_line(f: &FactorCertificate) -> String {
    let mut line = format!(
        "  factor count={} case={} multiplicity={} exponent={} degree={} certified={} witness={}",
        f.count,
        tag(&f.case),
        f.multiplicity,
        f.exponent,
        f.degree,
        f.certified,
        f.witness
    );
    if let Some(c) = f.lucas_coefficient {
        line.push_str(&format!(" lucas={c}"));
    }
    line
}

fn write_certificate_text<W: Write>(
    out: &mut W,
    label: &str,
    cert: &Certificate,
    trace: bool,
) -> Result<(), CliError> {
    writeln!(out, "{label}: {} in degree {}", tag(&cert.verdict), cert.degree)?;
    writeln!(out, "{label} witness: {}", cert.witness_string())?;
    if trace {
        for f in &cert.trace {
            writeln!(out, "{}", factor_line(f))?;
        }
    }
    Ok(())
}

fn certify<W: Write>(a: CertifyArgs, out: &mut W) -> Result<i32, CliError> {
    no_csv(a.format, "certify")?;
    let limits = limits()?;
    let d = a.dims.d;
    let (certified, json_body) = match a.kind {
        ProblemKind::Regular | ProblemKind::Skew => {
            let mut cert = if a.kind == ProblemKind::Regular {
                charclass::certify_regular_with(d, require("k", a.dims.k, a.kind)?, &limits)?
            } else {
                charclass::certify_skew_with(d, require("l", a.dims.l, a.kind)?, &limits)?
            };
            if a.format == Format::Text {
                let label = if a.kind == ProblemKind::Regular {
                    format!("regular (d={d}, k={})", a.dims.k.unwrap_or(0))
                } else {
                    format!("skew (d={d}, l={})", a.dims.l.unwrap_or(0))
                };
                writeln!(out, "problem: {label}")?;
                writeln!(out, "verdict: {}", tag(&cert.verdict))?;
                writeln!(out, "degree: {}", cert.degree)?;
                writeln!(out, "witness: {}", cert.witness_string())?;
                if a.trace {
                    for f in &cert.trace {
                        writeln!(out, "{}", factor_line(f))?;
                    }
                }
            }
            let witness = cert.witness_string();
            if !a.trace {
                cert.trace.clear();
            }
            (
                cert.verdict.is_certified(),
                json!({ "witness_string": witness, "certificate": cert }),
            )
        }
        ProblemKind::RegularSkew => {
            let k = require("k", a.dims.k, a.kind)?;
            let l = require("l", a.dims.l, a.kind)?;
            let mut cert = charclass::certify_regular_skew_with(d, k, l, &limits)?;
            if a.format == Format::Text {
                writeln!(out, "problem: regular-skew (d={d}, k={k}, l={l})")?;
                writeln!(out, "verdict: {}", tag(&cert.verdict))?;
                writeln!(out, "r: {}", cert.r)?;
                writeln!(out, "s: {}", cert.s)?;
                writeln!(out, "witness: {}", cert.witness_string())?;
                write_certificate_text(out, "regular part", &cert.regular, a.trace)?;
                write_certificate_text(out, "skew part", &cert.skew, a.trace)?;
            }
            let witness = cert.witness_string();
            if !a.trace {
                cert.regular.trace.clear();
                cert.skew.trace.clear();
            }
            (
                cert.verdict.is_certified(),
                json!({ "witness_string": witness, "certificate": cert }),
            )
        }
    };
    if a.format == Format::Json {
        write_json(out, "certify", json_body)?;
    }
    Ok(if certified { 0 } else { 1 })
}

fn dickson_cmd<W: Write>(a: DicksonArgs, out: &mut W) -> Result<i32, CliError> {
    no_csv(a.format, "dickson")?;
    let alg = dickson::dickson_invariants(a.m)?;
    let verification = if a.verify {
        let ok = dickson::verify_gl_invariance(&alg, a.long_run)?;
        Some((dickson::general_linear_group(a.m).len(), ok))
    } else {
        None
    };
    let m = alg.m;
    match a.format {
        Format::Json => {
            let invariants: Vec<Value> = (0..m)
                .rev()
                .map(|s| {
                    json!({
                        "s": s,
                        "degree": alg.degree_formula(s),
                        "polynomial": alg.q(s).to_string(),
                    })
                })
                .collect();
            let verification = verification.map(|(order, ok)| {
                json!({ "group_order": order, "invariant": ok })
            });
            write_json(
                out,
                "dickson",
                json!({ "m": m, "invariants": invariants, "verification": verification }),
            )?;
        }
        _ => {
            for s in (0..m).rev() {
                writeln!(
                    out,
                    "q_{{{m},{s}}} (degree {}) = {}",
                    alg.degree_formula(s),
                    alg.q(s)
                )?;
            }
            if let Some((order, ok)) = verification {
                let outcome = if ok { "all invariants fixed" } else { "NOT INVARIANT" };
                writeln!(out, "GL_{m}(F_2): {order} matrices, {outcome}")?;
            }
        }
    }
    Ok(match verification {
        Some((_, false)) => 1,
        _ => 0,
    })
}

fn verify_map<W: Write>(a: VerifyArgs, out: &mut W) -> Result<i32, CliError> {
    no_csv(a.format, "verify-map")?;
    let family = MapFamily::from_name(&a.family, a.k, a.n)?;
    let arithmetic = match a.arithmetic {
        ArithmeticMode::Exact => Arithmetic::ExactRational,
        ArithmeticMode::Float => Arithmetic::Float {
            tolerance: a.tolerance,
        },
    };
    let sampler = Sampler::Random {
        seed: a.seed,
        trials: a.trials,
        bound: a.bound,
    };
    let report = if a.affine {
        regcheck::check_affinely_regular(&family, a.k, &sampler, arithmetic)?
    } else {
        regcheck::check_k_regular(&family, a.k, &sampler, arithmetic)?
    };
    match a.format {
        Format::Json => write_json(
            out,
            "verify-map",
            json!({ "seed": a.seed, "report": report }),
        )?,
        _ => write_report_text(out, &report, a.seed)?,
    }
    let failed = a.expect == Some(Expectation::Clean) && report.has_counterexample();
    Ok(if failed { 1 } else { 0 })
}

fn write_report_text<W: Write>(out: &mut W, r: &RegularityReport, seed: u64) -> Result<(), CliError> {
    writeln!(out, "family: {} (target dimension {})", r.family, r.family.target_dim())?;
    writeln!(out, "tuple size: {}", r.k)?;
    if let Some(red) = r.reduction {
        writeln!(out, "reduction: {red}")?;
    }
    let mode = match r.arithmetic {
        Arithmetic::ExactRational => "EXACT_RATIONAL".to_string(),
        Arithmetic::Float { tolerance } => format!("FLOAT (tolerance {tolerance:e})"),
    };
    writeln!(out, "arithmetic: {mode}")?;
    writeln!(out, "seed: {seed}")?;
    writeln!(out, "trials: {}", r.trials)?;
    writeln!(out, "failures: {}", r.failures.len())?;
    if let Some(sep) = &r.min_separation_squared {
        writeln!(out, "min squared separation: {}", regcheck::rational_string(sep))?;
    }
    if let Some(f) = r.failures.first() {
        let pts: Vec<String> = f
            .points
            .iter()
            .map(|p| {
                let c: Vec<String> = p.iter().map(regcheck::rational_string).collect();
                format!("({})", c.join(", "))
            })
            .collect();
        writeln!(
            out,
            "first counterexample: trial {} rank {} defect {} at {}",
            f.trial,
            f.rank,
            f.defect,
            pts.join(" ")
        )?;
    }
    writeln!(out, "verdict: {}", tag(&r.verdict))?;
    Ok(())
}
