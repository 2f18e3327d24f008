//! Error kets, classicality conditions and consistency probabilities,
//! evaluated exactly on products of single-mode Gaussian states.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::operator::OperatorPolynomial;
use crate::phase::{binomial, ensure_dof, factorial, Monomial, PhasePolynomial, Var, VarKind};
use crate::scalar::{rational_to_f64, Coefficient, GaussianRational};
use crate::weyl::dequantize;

/// Mean and covariance of one mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeGaussian {
    pub mean_q: BigRational,
    pub mean_p: BigRational,
    pub var_q: BigRational,
    pub var_p: BigRational,
    pub cov_qp: BigRational,
}

impl ModeGaussian {
    pub fn new(
        mean_q: BigRational,
        mean_p: BigRational,
        var_q: BigRational,
        var_p: BigRational,
        cov_qp: BigRational,
    ) -> Self {
        ModeGaussian { mean_q, mean_p, var_q, var_p, cov_qp }
    }

    pub fn determinant(&self) -> BigRational {
        &self.var_q * &self.var_p - &self.cov_qp * &self.cov_qp
    }

    fn mean(&self, kind: VarKind) -> &BigRational {
        match kind {
            VarKind::Q => &self.mean_q,
            VarKind::P => &self.mean_p,
        }
    }

    fn variance(&self, kind: VarKind) -> &BigRational {
        match kind {
            VarKind::Q => &self.var_q,
            VarKind::P => &self.var_p,
        }
    }
}

/// Product of single-mode Gaussian Wigner distributions at a fixed hbar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussianState {
    hbar: BigRational,
    modes: Vec<ModeGaussian>,
}

impl GaussianState {
    /// Rejects covariances that are not positive definite or that violate
    /// `var_q var_p - cov_qp^2 >= hbar^2 / 4`.
    pub fn new(hbar: BigRational, modes: Vec<ModeGaussian>) -> Result<Self> {
        if !hbar.is_positive() {
            return Err(Error::Precondition("hbar must be positive".into()));
        }
        if modes.is_empty() {
            return Err(Error::Precondition("state needs at least one mode".into()));
        }
        let bound = &hbar * &hbar / BigRational::from_integer(4.into());
        for (i, m) in modes.iter().enumerate() {
            if !m.var_q.is_positive() || !m.determinant().is_positive() {
                return Err(Error::Precondition(format!("mode {i}: covariance is not positive definite")));
            }
            if m.determinant() < bound {
                return Err(Error::Precondition(format!("mode {i}: covariance violates the uncertainty relation")));
            }
        }
        Ok(GaussianState { hbar, modes })
    }

    /// Minimum-uncertainty state centred at `(q, p)` with `var = hbar/2`.
    pub fn coherent(hbar: BigRational, centers: &[(BigRational, BigRational)]) -> Result<Self> {
        let half = &hbar / BigRational::from_integer(2.into());
        let modes = centers
            .iter()
            .map(|(q, p)| ModeGaussian::new(q.clone(), p.clone(), half.clone(), half.clone(), BigRational::zero()))
            .collect();
        Self::new(hbar, modes)
    }

    pub fn dof(&self) -> usize {
        self.modes.len()
    }

    pub fn hbar(&self) -> &BigRational {
        &self.hbar
    }

    pub fn modes(&self) -> &[ModeGaussian] {
        &self.modes
    }

    pub fn mean(&self, v: Var) -> &BigRational {
        self.modes[v.mode].mean(v.kind)
    }

    pub fn variance(&self, v: Var) -> &BigRational {
        self.modes[v.mode].variance(v.kind)
    }
}

/// Classical central values `O^0` and error margins `delta`, flat order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalDatum {
    center: Vec<BigRational>,
    margins: Vec<BigRational>,
}

impl ClassicalDatum {
    pub fn new(center: Vec<BigRational>, margins: Vec<BigRational>) -> Result<Self> {
        if center.len() != margins.len() || !center.len().is_multiple_of(2) || center.is_empty() {
            return Err(Error::Precondition("datum needs 2N centers and 2N margins".into()));
        }
        if margins.iter().any(|d| !d.is_positive()) {
            return Err(Error::Precondition("error margins must be positive".into()));
        }
        Ok(ClassicalDatum { center, margins })
    }

    pub fn dof(&self) -> usize {
        self.center.len() / 2
    }

    pub fn center(&self, v: Var) -> &BigRational {
        &self.center[v.index(self.dof())]
    }

    pub fn margin(&self, v: Var) -> &BigRational {
        &self.margins[v.index(self.dof())]
    }

    pub fn centers(&self) -> &[BigRational] {
        &self.center
    }

    pub fn margins(&self) -> &[BigRational] {
        &self.margins
    }
}

/// One tested array of index sequences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceResult {
    pub sequences: Vec<Vec<Var>>,
    pub norm: BigRational,
    pub bound: BigRational,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalityReport {
    pub order: u32,
    pub results: Vec<SequenceResult>,
    pub classical: bool,
}

fn double_factorial_odd(n: u32) -> BigInt {
    // (n-1)!! for even n
    let mut acc = BigInt::one();
    let mut k = n.saturating_sub(1);
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

fn rpow(x: &BigRational, e: u32) -> BigRational {
    num_traits::pow::pow(x.clone(), e as usize)
}

/// Centred moment `E[x^i y^j]` of a bivariate Gaussian (Isserlis pairings).
fn centered_moment(i: u32, j: u32, mode: &ModeGaussian) -> BigRational {
    let mut acc = BigRational::zero();
    for k in 0..=i.min(j) {
        if !(i - k).is_multiple_of(2) || !(j - k).is_multiple_of(2) {
            continue;
        }
        let pairings =
            binomial(i, k) * binomial(j, k) * factorial(k) * double_factorial_odd(i - k) * double_factorial_odd(j - k);
        acc += BigRational::from_integer(pairings)
            * rpow(&mode.cov_qp, k)
            * rpow(&mode.var_q, (i - k) / 2)
            * rpow(&mode.var_p, (j - k) / 2);
    }
    acc
}

/// `E[q^a p^b]` for one mode.
fn raw_moment(a: u32, b: u32, mode: &ModeGaussian) -> BigRational {
    let mut acc = BigRational::zero();
    for i in 0..=a {
        for j in 0..=b {
            let c = binomial(a, i) * binomial(b, j);
            acc += BigRational::from_integer(c)
                * rpow(&mode.mean_q, a - i)
                * rpow(&mode.mean_p, b - j)
                * centered_moment(i, j, mode);
        }
    }
    acc
}

/// Exact phase-space average of a symbol, with hbar set to the state's value.
pub fn gaussian_moment(state: &GaussianState, a: &PhasePolynomial) -> Result<GaussianRational> {
    ensure_dof(a.dof(), state.dof())?;
    let mut acc = GaussianRational::zero();
    for (m, c) in a.terms() {
        let value = state
            .modes
            .iter()
            .enumerate()
            .fold(BigRational::one(), |v, (k, mode)| v * raw_moment(m.q()[k], m.p()[k], mode));
        acc += &c.evaluate(&state.hbar)?.scale(&value);
    }
    Ok(acc)
}

/// `<phi| X |phi>` through the Weyl symbol of `X`.
pub fn expectation(state: &GaussianState, x: &OperatorPolynomial) -> Result<GaussianRational> {
    gaussian_moment(state, &dequantize(x))
}

fn real_nonnegative(value: GaussianRational, what: &str) -> Result<BigRational> {
    if !value.is_real() || value.re.is_negative() {
        return Err(Error::InternalConsistency(format!("{what} is not a nonnegative real number: {value}")));
    }
    Ok(value.re)
}

/// `<E^m_X|E^m_X>` with `|E^m_X> = (X - x0)^m |phi>`.
pub fn error_ket_norm(state: &GaussianState, x: &OperatorPolynomial, x0: &BigRational, m: u32) -> Result<BigRational> {
    ensure_dof(x.dof(), state.dof())?;
    if m == 0 {
        return Err(Error::Precondition("error-ket order must be positive".into()));
    }
    if !x.is_self_adjoint() {
        return Err(Error::Precondition("observable is not self-adjoint".into()));
    }
    let shifted = x.sub(&OperatorPolynomial::constant(x.dof(), Coefficient::from_rational(x0.clone())))?;
    let power = shifted.pow(m);
    let value = expectation(state, &power.dagger().mul(&power)?)?;
    real_nonnegative(value, "error-ket norm")
}

/// Norm of `(O_j1 - O^0_j1) ... (O_jm - O^0_jm) |phi>`.
pub fn mixed_error_ket_norm(state: &GaussianState, seq: &[Var], datum: &ClassicalDatum) -> Result<BigRational> {
    let dof = state.dof();
    ensure_dof(datum.dof(), dof)?;
    let mut ket = OperatorPolynomial::identity(dof);
    for v in seq {
        v.check(dof)?;
        let centred = OperatorPolynomial::letter(dof, *v)
            .sub(&OperatorPolynomial::constant(dof, Coefficient::from_rational(datum.center(*v).clone())))?;
        ket = ket.mul(&centred)?;
    }
    let value = expectation(state, &ket.dagger().mul(&ket)?)?;
    real_nonnegative(value, "mixed error-ket norm")
}

/// Ordered index sequences whose mixed partial of `a` is not identically zero.
pub fn nonvanishing_sequences(a: &PhasePolynomial) -> BTreeSet<Vec<Var>> {
    let mut out = BTreeSet::new();
    let mut seen = BTreeSet::new();
    for (m, _) in a.terms() {
        for alpha in divisors(m) {
            if alpha.is_one() || !seen.insert(alpha.clone()) {
                continue;
            }
            if a.derivative_multi(&alpha).map(|d| d.is_zero()).unwrap_or(true) {
                continue;
            }
            permutations(&alpha.letters(), &mut out);
        }
    }
    out
}

fn divisors(m: &Monomial) -> Vec<Monomial> {
    let exps = m.flat();
    let mut out = vec![Vec::new()];
    for &e in exps {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<u32>| {
                (0..=e).map(move |k| {
                    let mut v = prefix.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    out.into_iter().map(Monomial::from_flat).collect()
}

fn permutations(letters: &[Var], out: &mut BTreeSet<Vec<Var>>) {
    fn go(remaining: &mut Vec<Var>, current: &mut Vec<Var>, out: &mut BTreeSet<Vec<Var>>) {
        if remaining.is_empty() {
            out.insert(current.clone());
            return;
        }
        let mut tried = BTreeSet::new();
        for i in 0..remaining.len() {
            if !tried.insert(remaining[i]) {
                continue;
            }
            let v = remaining.remove(i);
            current.push(v);
            go(remaining, current, out);
            current.pop();
            remaining.insert(i, v);
        }
    }
    go(&mut letters.to_vec(), &mut Vec::new(), out);
}

/// Tests `<E_S|E_S> <= delta_S^2` for every array of up to `order` sequences
/// drawn from the nonvanishing-derivative sequences of the observables.
/// `delta_S` is the product of the margins of every observable occurrence in
/// the array.
pub fn classicality_check(
    state: &GaussianState,
    datum: &ClassicalDatum,
    observables: &[PhasePolynomial],
    order: u32,
) -> Result<ClassicalityReport> {
    if order == 0 {
        return Err(Error::Precondition("classicality order must be positive".into()));
    }
    ensure_dof(datum.dof(), state.dof())?;
    let mut sequences = BTreeSet::new();
    for a in observables {
        ensure_dof(a.dof(), state.dof())?;
        sequences.extend(nonvanishing_sequences(a));
    }
    let sequences: Vec<Vec<Var>> = sequences.into_iter().collect();
    let mut results = Vec::new();
    let mut arrays: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 1..=order {
        arrays = arrays
            .into_iter()
            .flat_map(|prefix| {
                (0..sequences.len()).map(move |k| {
                    let mut v = prefix.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
        for array in &arrays {
            let chosen: Vec<Vec<Var>> = array.iter().map(|&k| sequences[k].clone()).collect();
            let flat: Vec<Var> = chosen.iter().flatten().copied().collect();
            let norm = mixed_error_ket_norm(state, &flat, datum)?;
            let bound = flat.iter().fold(BigRational::one(), |acc, v| {
                let d = datum.margin(*v);
                acc * d * d
            });
            let pass = norm <= bound;
            results.push(SequenceResult { sequences: chosen, norm, bound, pass });
        }
    }
    let classical = results.iter().all(|r| r.pass);
    Ok(ClassicalityReport { order, results, classical })
}

/// Standard normal CDF difference `Phi(b) - Phi(a)` for `a <= b`, evaluated
/// in the tail that keeps both terms small.
fn normal_mass(a: f64, b: f64) -> f64 {
    let s = std::f64::consts::SQRT_2;
    let upper = |z: f64| {
        if z == f64::INFINITY {
            0.0
        } else if z == f64::NEG_INFINITY {
            2.0
        } else {
            erfc(z / s)
        }
    };
    let lower = |z: f64| {
        if z == f64::INFINITY {
            2.0
        } else if z == f64::NEG_INFINITY {
            0.0
        } else {
            erfc(-z / s)
        }
    };
    if a >= 0.0 {
        0.5 * (upper(a) - upper(b))
    } else if b <= 0.0 {
        0.5 * (lower(b) - lower(a))
    } else {
        1.0 - 0.5 * (lower(a) + upper(b))
    }
}

/// Probability that the marginal of `v` falls in `[lo, hi]`. Accurate to
/// about 1e-14 absolute; zero for empty intervals.
pub fn interval_probability(state: &GaussianState, v: Var, lo: f64, hi: f64) -> Result<f64> {
    v.check(state.dof())?;
    if hi <= lo {
        return Ok(0.0);
    }
    let mean = rational_to_f64(state.mean(v));
    let sd = rational_to_f64(state.variance(v)).sqrt();
    Ok(normal_mass((lo - mean) / sd, (hi - mean) / sd).clamp(0.0, 1.0))
}

/// Absolute tolerance for every floating-point comparison.
pub const FLOAT_TOLERANCE: f64 = 1e-8;

/// Interval `O^0 +- delta / (1 - p)^(1/(2M))`.
pub fn consistency_interval(center: f64, margin: f64, p: f64, order: u32) -> (f64, f64) {
    let half = margin / (1.0 - p).powf(1.0 / (2.0 * order as f64));
    (center - half, center + half)
}

/// For each canonical variable (flat order), whether the state puts at least
/// probability `p` inside the consistency interval for every grid value.
pub fn consistency_check(state: &GaussianState, datum: &ClassicalDatum, order: u32, grid: &[f64]) -> Result<Vec<bool>> {
    ensure_dof(datum.dof(), state.dof())?;
    if order == 0 {
        return Err(Error::Precondition("consistency order must be positive".into()));
    }
    if let Some(p) = grid.iter().find(|p| !(0.0..1.0).contains(*p)) {
        return Err(Error::Precondition(format!("grid probability {p} outside [0, 1)")));
    }
    Var::all(state.dof())
        .map(|v| {
            let center = rational_to_f64(datum.center(v));
            let margin = rational_to_f64(datum.margin(v));
            for &p in grid {
                let (lo, hi) = consistency_interval(center, margin, p, order);
                if interval_probability(state, v, lo, hi)? < p - FLOAT_TOLERANCE {
                    return Ok(false);
                }
            }
            Ok(true)
        })
        .collect()
}

/// Digits kept when a complex modulus is irrational.
const MODULUS_DIGITS: u32 = 30;

/// `|z|`, exact when rational, otherwise rounded up to `10^-30`.
pub fn modulus_upper(z: &GaussianRational) -> BigRational {
    if z.im.is_zero() {
        return z.re.abs();
    }
    if z.re.is_zero() {
        return z.im.abs();
    }
    let n = z.norm_sqr();
    let (num, den) = (n.numer().clone(), n.denom().clone());
    let (rn, rd) = (num.sqrt(), den.sqrt());
    if &rn * &rn == num && &rd * &rd == den {
        return BigRational::new(rn, rd);
    }
    let scale = BigInt::from(10).pow(MODULUS_DIGITS);
    let scaled = (&num * &scale * &scale) / &den;
    BigRational::new(scaled.sqrt() + 1, scale)
}

/// `delta_A = sum_{k>=1} 1/k! sum_{i1..ik} |d^k A / dO_i1..dO_ik|_0 delta_i1 .. delta_ik`.
pub fn propagate_error(a: &PhasePolynomial, datum: &ClassicalDatum, hbar: &BigRational) -> Result<BigRational> {
    ensure_dof(a.dof(), datum.dof())?;
    let mut seen = BTreeSet::new();
    for (m, _) in a.terms() {
        seen.extend(divisors(m).into_iter().filter(|d| !d.is_one()));
    }
    let mut total = BigRational::zero();
    for alpha in seen {
        let value = a.derivative_multi(&alpha)?.evaluate(datum.centers(), hbar)?;
        if value.is_zero() {
            continue;
        }
        let spread = alpha.flat().iter().zip(datum.margins()).fold(BigRational::one(), |acc, (&e, d)| acc * rpow(d, e));
        total += modulus_upper(&value) * spread / BigRational::from_integer(alpha.factorial());
    }
    Ok(total)
}
