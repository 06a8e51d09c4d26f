//! Command-line front end. [`run`] is the whole program minus process
//! plumbing, so it can be driven from tests.
//!
//! Polynomials are comma-separated integer coefficients, constant term
//! first: `"-2,1"` is `x - 2`. Rationals print as `"p/q"` strings and parse
//! back with the same grammar.

use std::fmt::Write as _;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::density::{certify_non_density, critical_epsilon, epsilon_bound, factor_real, witness, CriticalOptions};
use crate::error::Error;
use crate::exact_linalg::{fmt_rational, IntMatrix, RatMatrix};
use crate::lattice_structure::{canonical_basis_m, integral_basis, newton_polygon, PivotRule};
use crate::poly_core::{mahler_measure, parse_polynomial, IntPolynomial, MahlerVariant};
use crate::toeplitz::{gram_growth, lyons_sweep, toeplitz_det_direct, trench_det, LaurentSymbol};

pub const SCHEMA: &str = "kronrec/1";

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Pretty,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Pivot {
    Nonnegative,
    Positive,
}

#[derive(Debug, Parser)]
#[command(name = "kronrec", version, about = "Recurrence lattices, torus density and banded Toeplitz determinants")]
struct Cli {
    #[arg(long, value_enum, global = true, default_value = "json")]
    format: Format,
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<std::path::PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mahler measure with an error bound.
    Mahler {
        #[arg(allow_hyphen_values = true)]
        poly: String,
        #[arg(long, default_value = "plain")]
        variant: MahlerVariant,
    },
    /// Density bounds derived from Mahler measures.
    Bound {
        #[arg(allow_hyphen_values = true)]
        poly: String,
    },
    /// Point of the recurrence subgroup near a target on the torus.
    Witness {
        #[arg(allow_hyphen_values = true)]
        poly: String,
        #[arg(long)]
        m: usize,
        /// Comma-separated target coordinates, `m` of them.
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        /// Defaults to the constructive epsilon of the factorization.
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Grid estimate of the smallest covering epsilon.
    CriticalEps {
        #[arg(allow_hyphen_values = true)]
        poly: String,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 12)]
        grid_n: usize,
        #[arg(long)]
        allow_large: bool,
    },
    /// Volume certificate that the subgroup is not eps-dense.
    CertifyNondense {
        #[arg(allow_hyphen_values = true)]
        poly: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        eps: f64,
    },
    /// p-adic Newton polygon.
    Newton {
        #[arg(allow_hyphen_values = true)]
        poly: String,
        #[arg(long)]
        p: u64,
    },
    /// Canonical p-adic basis of the recurrence lattice.
    Basis {
        #[arg(allow_hyphen_values = true)]
        poly: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value = "nonnegative")]
        pivot_rule: Pivot,
    },
    /// Index of the integral recurrences in the rational ones.
    Index {
        #[arg(allow_hyphen_values = true)]
        poly: String,
        #[arg(long)]
        m: usize,
    },
    /// Banded Toeplitz determinant of order n by Trench's formula.
    Trench {
        /// `c_{-r},...,c_s`, or the coefficients of `B` with `--product`.
        #[arg(allow_hyphen_values = true)]
        symbol: String,
        #[arg(long)]
        n: usize,
        /// Number of negative powers in the symbol.
        #[arg(long, default_value_t = 0)]
        r: usize,
        /// Read the argument as `B` and use the symbol `B(x) B(1/x)`.
        #[arg(long)]
        product: bool,
    },
    /// Ratios of successive Gram determinants against M(B)^2.
    GramGrowth {
        #[arg(allow_hyphen_values = true)]
        poly: String,
        #[arg(long, default_value_t = 30)]
        ell_max: usize,
    },
    /// Perturbed Gram ratio for l = 1..ell_max.
    Lyons {
        #[arg(allow_hyphen_values = true)]
        poly: String,
        /// Comma-separated 1-based indices; empty for the empty set.
        #[arg(long, default_value = "")]
        set: String,
        #[arg(long, default_value_t = 40)]
        ell_max: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_usage() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Domain(e)
        }
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn rat_matrix(m: &RatMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| m.row(i).iter().map(|x| Value::String(fmt_rational(x))).collect()).collect())
}

fn int_matrix(m: &IntMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| m.row(i).iter().map(|x| Value::String(x.to_string())).collect()).collect())
}

fn poly(text: &str) -> Result<IntPolynomial, Failure> {
    Ok(parse_polynomial(text)?)
}

fn floats(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Failure::Usage(format!("not a number: {t:?}"))))
        .collect()
}

fn indices(text: &str) -> Result<Vec<usize>, Failure> {
    if text.trim().is_empty() {
        return Ok(vec![]);
    }
    text.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| Failure::Usage(format!("not an index: {t:?}"))))
        .collect()
}

fn execute(cmd: &Command, log: &mut String) -> Result<(&'static str, Value), Failure> {
    Ok(match cmd {
        Command::Mahler { poly: p, variant } => ("mahler", to_value(&mahler_measure(&poly(p)?, *variant)?)),
        Command::Bound { poly: p } => {
            let a = poly(p)?;
            let mut v = to_value(&epsilon_bound(&a)?);
            v["factorization"] = to_value(&factor_real(&a)?);
            ("bound", v)
        }
        Command::Witness { poly: p, m, target, eps } => {
            let t = floats(target)?;
            ("witness", to_value(&witness(&poly(p)?, *m, &t, eps.unwrap_or(f64::INFINITY))?))
        }
        Command::CriticalEps { poly: p, m, grid_n, allow_large } => {
            let a = poly(p)?;
            let _ = writeln!(log, "critical-eps: m = {m}, grid {grid_n}^{}", m.saturating_sub(a.degree()));
            let opts = CriticalOptions { grid_n: *grid_n, allow_large: *allow_large };
            ("critical-eps", to_value(&critical_epsilon(&a, *m, opts)?))
        }
        Command::CertifyNondense { poly: p, m, eps } => {
            ("certify-nondense", to_value(&certify_non_density(&poly(p)?, *m, *eps)?))
        }
        Command::Newton { poly: p, p: prime } => ("newton", to_value(&newton_polygon(&poly(p)?, *prime)?)),
        Command::Basis { poly: p, p: prime, m, pivot_rule } => {
            let rule = match pivot_rule {
                Pivot::Nonnegative => PivotRule::NonNegative,
                Pivot::Positive => PivotRule::Positive,
            };
            let b = canonical_basis_m(&poly(p)?, *prime, *m, rule)?;
            let mut v = to_value(&b);
            v["certified"] = Value::Bool(b.certificate.all_hold());
            ("basis", v)
        }
        Command::Index { poly: p, m } => {
            let a = poly(p)?;
            let lb = integral_basis(&a, *m)?;
            let expected = num_traits::pow(a.leading().clone(), m - a.degree());
            let v = json!({
                "m": m,
                "index": lb.index.to_string(),
                "expected": num_traits::Signed::abs(&expected).to_string(),
                "n": rat_matrix(&lb.n),
                "z_basis": int_matrix(&lb.z_basis),
            });
            ("index", v)
        }
        Command::Trench { symbol, n, r, product } => {
            let c = if *product { LaurentSymbol::from_product(&poly(symbol)?) } else { LaurentSymbol::parse(symbol, *r)? };
            let t = trench_det(&c, *n)?;
            let mut v = to_value(&t);
            if *n >= 1 {
                v["direct"] = Value::String(fmt_rational(&toeplitz_det_direct(&c, n - 1)));
            }
            v["symbol"] = Value::Array(c.coeffs().iter().map(|x| Value::String(fmt_rational(x))).collect());
            v["r"] = json!(c.r());
            v["s"] = json!(c.s());
            ("trench", v)
        }
        Command::GramGrowth { poly: p, ell_max } => ("gram-growth", to_value(&gram_growth(&poly(p)?, *ell_max)?)),
        Command::Lyons { poly: p, set, ell_max } => {
            let s = indices(set)?;
            let pts = lyons_sweep(&poly(p)?, &s, *ell_max)?;
            let tail = &pts[pts.len().saturating_sub(11)..];
            let lo = tail.iter().map(|x| x.ratio).fold(f64::INFINITY, f64::min);
            let hi = tail.iter().map(|x| x.ratio).fold(f64::NEG_INFINITY, f64::max);
            ("lyons", json!({ "set": s, "points": pts, "tail_fluctuation": hi - lo }))
        }
    })
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, x)| flatten(&key(k), x, out)),
        Value::Array(xs) => xs.iter().enumerate().for_each(|(i, x)| flatten(&key(&i.to_string()), x, out)),
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

/// A top-level array of flat objects, rendered as a table.
fn table(v: &Value) -> Option<(Vec<String>, Vec<Vec<String>>)> {
    let rows = v.as_object()?.get("points")?.as_array()?;
    let first = rows.first()?.as_object()?;
    let header: Vec<String> = first.keys().cloned().collect();
    let body = rows
        .iter()
        .map(|r| header.iter().map(|h| r.get(h).map(scalar).unwrap_or_default()).collect())
        .collect();
    Some((header, body))
}

fn render(format: Format, v: &Value) -> String {
    match format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(v).expect("json")),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let written = match table(v) {
                Some((header, body)) => std::iter::once(header).chain(body).try_for_each(|r| w.write_record(&r)),
                None => {
                    let mut kv = Vec::new();
                    flatten("", v, &mut kv);
                    std::iter::once(("key".to_string(), "value".to_string()))
                        .chain(kv)
                        .try_for_each(|(k, x)| w.write_record([k, x]))
                }
            };
            written.expect("in-memory csv");
            String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 fields")
        }
        Format::Pretty => {
            let mut kv = Vec::new();
            flatten("", v, &mut kv);
            let w = kv.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            kv.iter().map(|(k, x)| format!("{k:<w$}  {x}\n")).collect()
        }
    }
}

fn envelope(command: &str, body: Value) -> Value {
    let mut map = Map::new();
    map.insert("schema".into(), Value::String(SCHEMA.into()));
    map.insert("command".into(), Value::String(command.into()));
    match body {
        Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("result".into(), other);
        }
    }
    Value::Object(map)
}

/// Exit code 0 on success, 1 on a domain error (reported as JSON on
/// standard output), 2 on a usage error.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let mut log = String::new();
    let (code, report) = match execute(&cli.command, &mut log) {
        Ok((name, body)) => (0, envelope(name, body)),
        Err(Failure::Usage(msg)) => {
            return Outcome { code: 2, stdout: String::new(), stderr: format!("error: {msg}\n") };
        }
        Err(Failure::Domain(e)) => {
            let body = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            (1, envelope("error", body))
        }
    };
    let text = render(if code == 0 { cli.format } else { Format::Json }, &report);
    match &cli.output {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => Outcome { code, stdout: String::new(), stderr: log },
            Err(e) => Outcome { code: 1, stdout: String::new(), stderr: format!("{log}error: {}: {e}\n", path.display()) },
        },
        None => Outcome { code, stdout: text, stderr: log },
    }
}
