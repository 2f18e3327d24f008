//! Command-line front end. [`run`] performs one invocation in-process and
//! returns the exit code together with everything destined for the two
//! standard streams; the `weylstar` binary is a thin wrapper around it.

use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::classicality::{classicality_check, consistency_check, ClassicalDatum, GaussianState, ModeGaussian};
use crate::dynamics::{heisenberg_series, poisson_series, trajectory, unitary_series};
use crate::error::{Error, Result};
use crate::operator::OperatorPolynomial;
use crate::phase::{PhasePolynomial, Var};
use crate::scalar::{fmt_rational, parse_rational, GaussianRational};
use crate::star::{moyal_bracket, star};
use crate::syntax::parse::{parse_classical, parse_operator};
use crate::syntax::render::{
    classical_to_json, operator_to_json, polys_to_text, render_classical, render_operator, render_value,
    report_to_json, report_to_text, series_to_csv, trajectory_to_csv, PolynomialJson,
};
use crate::weyl::{dequantize, quantize};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HbarMode {
    Symbolic,
    Value(BigRational),
}

fn parse_hbar(s: &str) -> std::result::Result<HbarMode, String> {
    if s == "symbolic" {
        return Ok(HbarMode::Symbolic);
    }
    parse_rational(s).map(HbarMode::Value).ok_or_else(|| format!("expected 'symbolic' or a rational, got '{s}'"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "weylstar", version, about = "Exact star-product calculus on polynomial phase-space observables")]
struct Cli {
    /// Number of degrees of freedom.
    #[arg(long, global = true, default_value_t = 1)]
    dof: usize,

    /// Truncation order of series verbs.
    #[arg(long, global = true)]
    order: Option<usize>,

    /// `symbolic` or a positive rational substituted for hbar.
    #[arg(long, global = true, default_value = "symbolic", value_parser = parse_hbar, allow_hyphen_values = true)]
    hbar: HbarMode,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    verb: Verb,
}

#[derive(Debug, Subcommand)]
enum Verb {
    /// Star product of two classical polynomials.
    Star {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Moyal bracket of two classical polynomials.
    Bracket {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Poisson bracket of two classical polynomials.
    Poisson {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Weyl symbol of an operator polynomial.
    Dequantize {
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// Symmetric quantization of a classical polynomial.
    Quantize {
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
    /// Heisenberg series of an observable under a Hamiltonian symbol.
    Evolve {
        #[arg(allow_hyphen_values = true)]
        h: String,
        #[arg(allow_hyphen_values = true)]
        a: String,
        /// Comma-separated phase-space point (q0..,p0..) for a trajectory table.
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        /// Comma-separated times of the trajectory table.
        #[arg(long, allow_hyphen_values = true)]
        times: Option<String>,
    },
    /// Star-unitary propagator series of a Hamiltonian symbol.
    Unitary {
        #[arg(allow_hyphen_values = true)]
        h: String,
    },
    /// Classicality report for a Gaussian state described in a JSON file.
    Classicality { config: PathBuf },
    /// Evaluate a classical polynomial at a phase-space point.
    Eval {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and executes the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: 2, stdout: String::new(), stderr: text },
            };
        }
    };
    match execute(&cli) {
        Ok(text) => match &cli.out {
            Some(path) => match std::fs::write(path, &text) {
                Ok(()) => Outcome { code: 0, stdout: String::new(), stderr: String::new() },
                Err(e) => failure(&Error::Io(format!("{}: {e}", path.display()))),
            },
            None => Outcome { code: 0, stdout: text, stderr: String::new() },
        },
        Err(e) => failure(&e),
    }
}

fn failure(e: &Error) -> Outcome {
    Outcome { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") }
}

fn execute(cli: &Cli) -> Result<String> {
    if cli.dof == 0 {
        return Err(Error::Precondition("--dof must be positive".into()));
    }
    if let HbarMode::Value(h) = &cli.hbar {
        if !h.is_positive() {
            return Err(Error::Precondition("--hbar must be positive".into()));
        }
    }
    let dof = cli.dof;
    match &cli.verb {
        Verb::Star { a, b } => {
            let (a, b) = (classical(a, dof)?, classical(b, dof)?);
            emit_classical(cli, &star(&a, &b)?)
        }
        Verb::Bracket { a, b } => {
            let (a, b) = (classical(a, dof)?, classical(b, dof)?);
            emit_classical(cli, &moyal_bracket(&a, &b)?)
        }
        Verb::Poisson { a, b } => {
            let (a, b) = (classical(a, dof)?, classical(b, dof)?);
            emit_classical(cli, &a.poisson_bracket(&b)?)
        }
        Verb::Dequantize { x } => {
            let x = operator(x, dof)?;
            emit_classical(cli, &dequantize(&x))
        }
        Verb::Quantize { a } => {
            let a = classical(a, dof)?;
            emit_operator(cli, &quantize(&a))
        }
        Verb::Evolve { h, a, at, times } => {
            let (h, a) = (classical(h, dof)?, classical(a, dof)?);
            let order = require_order(cli)?;
            match at {
                Some(at) => evolve_trajectory(cli, &h, &a, order, at, times.as_deref()),
                None => {
                    if times.is_some() {
                        return Err(Error::Precondition("--times needs --at".into()));
                    }
                    emit_series(cli, heisenberg_series(&h, &a, order)?.coefficients)
                }
            }
        }
        Verb::Unitary { h } => {
            let h = classical(h, dof)?;
            let order = require_order(cli)?;
            emit_series(cli, unitary_series(&h, order)?.coefficients)
        }
        Verb::Classicality { config } => run_classicality(cli, config),
        Verb::Eval { a, at } => {
            let a = classical(a, dof)?;
            let hbar = require_hbar(cli, "eval")?;
            let point = rational_list(at, "--at")?;
            if point.len() != 2 * dof {
                return Err(Error::Precondition(format!("--at needs {} values, got {}", 2 * dof, point.len())));
            }
            let value = a.evaluate(&point, &hbar)?;
            match cli.format {
                Format::Text => Ok(format!("{}\n", render_value(&value))),
                Format::Json => json_text(&value_json(&value)),
                Format::Csv => Err(csv_refused()),
            }
        }
    }
}

/// Reads an expression, or the contents of a file when prefixed with `@`.
fn operand(text: &str) -> Result<String> {
    match text.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}"))),
        None => Ok(text.to_string()),
    }
}

fn classical(text: &str, dof: usize) -> Result<PhasePolynomial> {
    parse_classical(&operand(text)?, dof)
}

fn operator(text: &str, dof: usize) -> Result<OperatorPolynomial> {
    parse_operator(&operand(text)?, dof)
}

fn require_order(cli: &Cli) -> Result<usize> {
    cli.order.ok_or_else(|| Error::Precondition("this verb needs an explicit --order".into()))
}

fn require_hbar(cli: &Cli, verb: &str) -> Result<BigRational> {
    match &cli.hbar {
        HbarMode::Value(h) => Ok(h.clone()),
        HbarMode::Symbolic => Err(Error::Precondition(format!("{verb} needs a rational --hbar"))),
    }
}

fn csv_refused() -> Error {
    Error::Format("csv output is only available for series (evolve, unitary)".into())
}

/// Comma-separated rationals; a malformed entry is reported with its column.
fn rational_list(text: &str, what: &str) -> Result<Vec<BigRational>> {
    let mut out = Vec::new();
    let mut column = 1;
    for piece in text.split(',') {
        match parse_rational(piece) {
            Some(r) => out.push(r),
            None => {
                return Err(Error::Parse {
                    line: 1,
                    column,
                    message: format!("malformed rational '{}' in {what}", piece.trim()),
                    expected: vec!["rational".into()],
                })
            }
        }
        column += piece.chars().count() + 1;
    }
    Ok(out)
}

fn json_text<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct ValueJson {
    re: String,
    im: String,
}

fn value_json(z: &GaussianRational) -> ValueJson {
    ValueJson { re: fmt_rational(&z.re), im: fmt_rational(&z.im) }
}

#[derive(Serialize)]
struct SeriesJson {
    order: usize,
    coefficients: Vec<PolynomialJson>,
}

#[derive(Serialize)]
struct TrajectoryRowJson {
    t: String,
    moyal: ValueJson,
    poisson: ValueJson,
}

fn apply_hbar(cli: &Cli, a: &PhasePolynomial) -> Result<PhasePolynomial> {
    match &cli.hbar {
        HbarMode::Symbolic => Ok(a.clone()),
        HbarMode::Value(h) => a.substitute_hbar(h),
    }
}

fn emit_classical(cli: &Cli, a: &PhasePolynomial) -> Result<String> {
    let a = apply_hbar(cli, a)?;
    match cli.format {
        Format::Text => Ok(format!("{}\n", render_classical(&a))),
        Format::Json => json_text(&classical_to_json(&a)),
        Format::Csv => Err(csv_refused()),
    }
}

fn emit_operator(cli: &Cli, x: &OperatorPolynomial) -> Result<String> {
    let x = match &cli.hbar {
        HbarMode::Symbolic => x.clone(),
        HbarMode::Value(h) => x.substitute_hbar(h)?,
    };
    match cli.format {
        Format::Text => Ok(format!("{}\n", render_operator(&x))),
        Format::Json => json_text(&operator_to_json(&x)),
        Format::Csv => Err(csv_refused()),
    }
}

fn emit_series(cli: &Cli, series: Vec<PhasePolynomial>) -> Result<String> {
    let series = series.iter().map(|a| apply_hbar(cli, a)).collect::<Result<Vec<_>>>()?;
    match cli.format {
        Format::Text => Ok(polys_to_text(&series)),
        Format::Csv => Ok(series_to_csv(&series)),
        Format::Json => {
            let coefficients = series.iter().map(classical_to_json).collect();
            json_text(&SeriesJson { order: series.len() - 1, coefficients })
        }
    }
}

fn evolve_trajectory(
    cli: &Cli,
    h: &PhasePolynomial,
    a: &PhasePolynomial,
    order: usize,
    at: &str,
    times: Option<&str>,
) -> Result<String> {
    let hbar = require_hbar(cli, "a trajectory table")?;
    let point = rational_list(at, "--at")?;
    if point.len() != 2 * cli.dof {
        return Err(Error::Precondition(format!("--at needs {} values, got {}", 2 * cli.dof, point.len())));
    }
    let times = rational_list(times.ok_or_else(|| Error::Precondition("--at needs --times".into()))?, "--times")?;
    let moyal = heisenberg_series(h, a, order)?;
    let classical = poisson_series(h, a, order)?;
    let rows = trajectory(&moyal, &classical, &times, &point, &hbar)?;
    match cli.format {
        Format::Csv => Ok(trajectory_to_csv(&rows)),
        Format::Text => {
            let mut out = String::from("t\tmoyal\tpoisson\n");
            for (t, m, c) in &rows {
                out.push_str(&format!("{}\t{}\t{}\n", fmt_rational(t), render_value(m), render_value(c)));
            }
            Ok(out)
        }
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|(t, m, c)| TrajectoryRowJson { t: fmt_rational(t), moyal: value_json(m), poisson: value_json(c) })
                .collect();
            json_text(&rows)
        }
    }
}

/// Rationals in the configuration file may be written as JSON integers or as
/// strings such as `"-3/4"`.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RationalField {
    Int(i64),
    Text(String),
}

impl RationalField {
    fn value(&self, field: &str) -> Result<BigRational> {
        match self {
            RationalField::Int(n) => Ok(BigRational::from_integer((*n).into())),
            RationalField::Text(s) => {
                parse_rational(s).ok_or_else(|| Error::Format(format!("{field}: '{s}' is not a rational")))
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModeConfig {
    /// `[q, p]`
    mean: [RationalField; 2],
    /// `[var_q, var_p, cov_qp]`
    cov: [RationalField; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassicalityConfig {
    dof: Option<usize>,
    hbar: Option<RationalField>,
    modes: Vec<ModeConfig>,
    center: Vec<RationalField>,
    margins: Vec<RationalField>,
    observables: Vec<String>,
    order: Option<u32>,
    #[serde(default)]
    p_grid: Vec<f64>,
}

fn load_config(path: &Path) -> Result<ClassicalityConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: format!("invalid classicality configuration: {e}"),
        expected: vec!["configuration object".into()],
    })
}

fn run_classicality(cli: &Cli, path: &Path) -> Result<String> {
    let config = load_config(path)?;
    let dof = config.dof.unwrap_or(config.modes.len());
    if dof != config.modes.len() {
        return Err(Error::Precondition(format!("dof {dof} but {} modes given", config.modes.len())));
    }
    let hbar = match (&cli.hbar, &config.hbar) {
        (HbarMode::Value(h), _) => h.clone(),
        (HbarMode::Symbolic, Some(h)) => h.value("hbar")?,
        (HbarMode::Symbolic, None) => return Err(Error::Precondition("classicality needs a rational hbar".into())),
    };
    let modes = config
        .modes
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let name = |f: &str| format!("modes[{i}].{f}");
            Ok(ModeGaussian::new(
                m.mean[0].value(&name("mean"))?,
                m.mean[1].value(&name("mean"))?,
                m.cov[0].value(&name("cov"))?,
                m.cov[1].value(&name("cov"))?,
                m.cov[2].value(&name("cov"))?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let state = GaussianState::new(hbar, modes)?;
    let center = config.center.iter().map(|r| r.value("center")).collect::<Result<Vec<_>>>()?;
    let margins = config.margins.iter().map(|r| r.value("margins")).collect::<Result<Vec<_>>>()?;
    let datum = ClassicalDatum::new(center, margins)?;
    let observables = config.observables.iter().map(|s| parse_classical(s, dof)).collect::<Result<Vec<_>>>()?;
    let order = match (cli.order, config.order) {
        (Some(k), _) => u32::try_from(k).map_err(|_| Error::Precondition("order too large".into()))?,
        (None, Some(k)) => k,
        (None, None) => return Err(Error::Precondition("classicality needs an order".into())),
    };
    let report = classicality_check(&state, &datum, &observables, order)?;
    let consistency =
        if config.p_grid.is_empty() { None } else { Some(consistency_check(&state, &datum, order, &config.p_grid)?) };
    let labels: Vec<Var> = Var::all(dof).collect();
    match cli.format {
        Format::Csv => Err(csv_refused()),
        Format::Text => {
            let mut out = report_to_text(&report);
            if let Some(flags) = &consistency {
                for (v, ok) in labels.iter().zip(flags) {
                    out.push_str(&format!("consistency {v}: {}\n", if *ok { "pass" } else { "FAIL" }));
                }
            }
            Ok(out)
        }
        Format::Json => {
            let mut value = report_to_json(&report);
            if let Some(flags) = &consistency {
                let rows: Vec<_> =
                    labels.iter().zip(flags).map(|(v, ok)| json!({ "variable": v.to_string(), "pass": ok })).collect();
                value["consistency"] = json!(rows);
            }
            json_text(&value)
        }
    }
}
