//! Canonical text, JSON and CSV forms.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::classicality::ClassicalityReport;
use crate::dynamics::EvolutionSeries;
use crate::error::{Error, Result};
use crate::operator::OperatorPolynomial;
use crate::phase::{Monomial, PhasePolynomial, Var};
use crate::scalar::{fmt_rational, parse_rational, Coefficient, GaussianRational};

fn render_vars(m: &Monomial, letters: (char, char)) -> Vec<String> {
    let dof = m.dof();
    let mut out = Vec::new();
    for v in Var::all(dof) {
        let e = m.exp(v);
        if e == 0 {
            continue;
        }
        let letter = match v.kind {
            crate::phase::VarKind::Q => letters.0,
            crate::phase::VarKind::P => letters.1,
        };
        if e == 1 {
            out.push(format!("{letter}{}", v.mode));
        } else {
            out.push(format!("{letter}{}^{e}", v.mode));
        }
    }
    out
}

/// Splits a scalar into an overall sign and the factor strings for its
/// magnitude. A unit magnitude yields no factors.
fn scalar_factors(z: &GaussianRational) -> (bool, Vec<String>) {
    match (z.re.is_zero(), z.im.is_zero()) {
        (false, true) => {
            let neg = z.re.is_negative();
            let mag = z.re.abs();
            let factors = if mag.is_one() { vec![] } else { vec![fmt_rational(&mag)] };
            (neg, factors)
        }
        (true, false) => {
            let neg = z.im.is_negative();
            let mag = z.im.abs();
            let mut factors = if mag.is_one() { vec![] } else { vec![fmt_rational(&mag)] };
            factors.push("i".into());
            (neg, factors)
        }
        _ => (false, vec![format!("({z})")]),
    }
}

fn render_terms<'a>(terms: impl Iterator<Item = (&'a Monomial, &'a Coefficient)>, letters: (char, char)) -> String {
    let mut out = String::new();
    for (m, c) in terms {
        let vars = render_vars(m, letters);
        for (k, z) in c.iter() {
            let (negative, mut factors) = scalar_factors(z);
            match k {
                0 => {}
                1 => factors.push("hbar".into()),
                _ => factors.push(format!("hbar^{k}")),
            }
            factors.extend(vars.iter().cloned());
            let body = if factors.is_empty() { "1".to_string() } else { factors.join("*") };
            match (out.is_empty(), negative) {
                (true, false) => out.push_str(&body),
                (true, true) => {
                    out.push('-');
                    out.push_str(&body);
                }
                (false, false) => {
                    out.push_str(" + ");
                    out.push_str(&body);
                }
                (false, true) => {
                    out.push_str(" - ");
                    out.push_str(&body);
                }
            }
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

/// Canonical text for a symbol, e.g. `q0*p0 + 1/2*i*hbar`.
pub fn render_classical(a: &PhasePolynomial) -> String {
    render_terms(a.terms(), ('q', 'p'))
}

/// Canonical text for a normal-ordered operator, e.g. `Q0*P0 - i*hbar`.
pub fn render_operator(x: &OperatorPolynomial) -> String {
    render_terms(x.terms(), ('Q', 'P'))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub q: Vec<u32>,
    pub p: Vec<u32>,
    pub hbar: i32,
    pub re: String,
    pub im: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub dof: usize,
    pub terms: Vec<TermJson>,
}

fn terms_json<'a>(dof: usize, terms: impl Iterator<Item = (&'a Monomial, &'a Coefficient)>) -> PolynomialJson {
    let mut out = Vec::new();
    for (m, c) in terms {
        for (k, z) in c.iter() {
            out.push(TermJson {
                q: m.q().to_vec(),
                p: m.p().to_vec(),
                hbar: k,
                re: fmt_rational(&z.re),
                im: fmt_rational(&z.im),
            });
        }
    }
    PolynomialJson { dof, terms: out }
}

pub fn classical_to_json(a: &PhasePolynomial) -> PolynomialJson {
    terms_json(a.dof(), a.terms())
}

pub fn operator_to_json(x: &OperatorPolynomial) -> PolynomialJson {
    terms_json(x.dof(), x.terms())
}

fn decode_terms(json: &PolynomialJson) -> Result<Vec<(Monomial, Coefficient)>> {
    let bad = |msg: &str| Error::Format(msg.to_string());
    if json.dof == 0 {
        return Err(bad("dof must be positive"));
    }
    json.terms
        .iter()
        .map(|t| {
            if t.q.len() != json.dof || t.p.len() != json.dof {
                return Err(bad("exponent vector length differs from dof"));
            }
            let re = parse_rational(&t.re).ok_or_else(|| bad("malformed rational in 're'"))?;
            let im = parse_rational(&t.im).ok_or_else(|| bad("malformed rational in 'im'"))?;
            Ok((Monomial::from_exps(&t.q, &t.p), Coefficient::term(t.hbar, GaussianRational::new(re, im))))
        })
        .collect()
}

pub fn classical_from_json(json: &PolynomialJson) -> Result<PhasePolynomial> {
    Ok(PhasePolynomial::from_terms(json.dof, decode_terms(json)?))
}

pub fn operator_from_json(json: &PolynomialJson) -> Result<OperatorPolynomial> {
    Ok(OperatorPolynomial::from_terms(json.dof, decode_terms(json)?))
}

/// `n,term_index,q_exps,p_exps,hbar_pow,re,im`, exponents `;`-separated.
pub fn series_to_csv(series: &[PhasePolynomial]) -> String {
    let mut out = String::from("n,term_index,q_exps,p_exps,hbar_pow,re,im\n");
    for (n, a) in series.iter().enumerate() {
        let json = classical_to_json(a);
        for (idx, t) in json.terms.iter().enumerate() {
            let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(";");
            out.push_str(&format!("{n},{idx},{},{},{},{},{}\n", join(&t.q), join(&t.p), t.hbar, t.re, t.im));
        }
    }
    out
}

/// Text form of a complex value: `a/b` or `a/b+c/d*i`.
pub fn render_value(z: &GaussianRational) -> String {
    z.to_string()
}

pub fn trajectory_to_csv(rows: &[(BigRational, GaussianRational, GaussianRational)]) -> String {
    let mut out = String::from("t,moyal_value,poisson_value\n");
    for (t, m, c) in rows {
        out.push_str(&format!("{},{},{}\n", fmt_rational(t), render_value(m), render_value(c)));
    }
    out
}

pub fn series_to_text(series: &EvolutionSeries) -> String {
    polys_to_text(&series.coefficients)
}

pub fn polys_to_text(series: &[PhasePolynomial]) -> String {
    series.iter().enumerate().map(|(n, a)| format!("[{n}] {}\n", render_classical(a))).collect()
}

#[derive(Serialize)]
struct ReportRowJson {
    sequences: Vec<Vec<String>>,
    norm: String,
    bound: String,
    pass: bool,
}

#[derive(Serialize)]
struct ReportJson {
    order: u32,
    classical: bool,
    results: Vec<ReportRowJson>,
}

pub fn report_to_json(report: &ClassicalityReport) -> serde_json::Value {
    let json = ReportJson {
        order: report.order,
        classical: report.classical,
        results: report
            .results
            .iter()
            .map(|r| ReportRowJson {
                sequences: r.sequences.iter().map(|s| s.iter().map(Var::to_string).collect()).collect(),
                norm: fmt_rational(&r.norm),
                bound: fmt_rational(&r.bound),
                pass: r.pass,
            })
            .collect(),
    };
    serde_json::to_value(json).expect("report serializes")
}

pub fn report_to_text(report: &ClassicalityReport) -> String {
    let mut out = String::from("sequences\tnorm\tbound\tpass\n");
    for r in &report.results {
        let seqs: Vec<String> = r
            .sequences
            .iter()
            .map(|s| format!("({})", s.iter().map(Var::to_string).collect::<Vec<_>>().join(",")))
            .collect();
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            seqs.join(" "),
            fmt_rational(&r.norm),
            fmt_rational(&r.bound),
            if r.pass { "pass" } else { "FAIL" }
        ));
    }
    let verdict = if report.classical { "" } else { "not " };
    out.push_str(&format!("verdict: {verdict}{}-order classical\n", report.order));
    out
}
