//! Time evolution of Weyl symbols as truncated power series in `t`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::phase::{ensure_dof, PhasePolynomial, Var};
use crate::scalar::{Coefficient, GaussianRational};
use crate::star::{moyal_bracket, star};

/// `A(t) ~ sum_{n <= order} t^n A_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvolutionSeries {
    pub coefficients: Vec<PhasePolynomial>,
}

impl EvolutionSeries {
    pub fn order(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn dof(&self) -> usize {
        self.coefficients[0].dof()
    }

    /// Sums the truncated series at a rational time, phase-space point and hbar.
    pub fn evaluate(&self, t: &BigRational, point: &[BigRational], hbar: &BigRational) -> Result<GaussianRational> {
        let mut acc = GaussianRational::zero();
        let mut t_pow = BigRational::one();
        for a in &self.coefficients {
            acc += &a.evaluate(point, hbar)?.scale(&t_pow);
            t_pow *= t;
        }
        Ok(acc)
    }
}

/// `U(t) ~ sum t^n U_n` together with the series of its star inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitarySeries {
    pub coefficients: Vec<PhasePolynomial>,
    pub inverse: Vec<PhasePolynomial>,
}

impl UnitarySeries {
    pub fn order(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    /// Coefficientwise complex conjugate `U*`.
    pub fn conjugate(&self) -> Vec<PhasePolynomial> {
        self.coefficients.iter().map(PhasePolynomial::conjugate).collect()
    }
}

fn ratio(n: i64, d: i64) -> Coefficient {
    Coefficient::from_rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
}

/// `i / hbar / (n + 1)`.
fn moyal_step(n: usize) -> Coefficient {
    Coefficient::term(-1, GaussianRational::i()).scale_rational(&BigRational::new(BigInt::one(), BigInt::from(n + 1)))
}

/// `A_{n+1} = (i/hbar) [H, A_n]_M / (n + 1)`, `A_0 = A`.
pub fn heisenberg_series(h: &PhasePolynomial, a: &PhasePolynomial, order: usize) -> Result<EvolutionSeries> {
    ensure_dof(h.dof(), a.dof())?;
    let check = !h.has_negative_hbar() && !a.has_negative_hbar();
    let mut coefficients = vec![a.clone()];
    for n in 0..order {
        let next = moyal_bracket(h, &coefficients[n])?.scale(&moyal_step(n));
        if check && next.has_negative_hbar() {
            return Err(Error::InternalConsistency(format!(
                "Heisenberg coefficient {} carries a negative power of hbar",
                n + 1
            )));
        }
        coefficients.push(next);
    }
    Ok(EvolutionSeries { coefficients })
}

/// `(n+1) A_{n+1} - (i/hbar)[H, A_n]_M` for `n < order`; zero for a true solution.
pub fn eom_residual(h: &PhasePolynomial, series: &EvolutionSeries) -> Result<Vec<PhasePolynomial>> {
    let mut out = Vec::new();
    for n in 0..series.order() {
        let lhs = series.coefficients[n + 1].scale(&Coefficient::from_int(n as i64 + 1));
        let rhs = moyal_bracket(h, &series.coefficients[n])?.scale(&moyal_step(0));
        out.push(lhs.sub(&rhs)?);
    }
    Ok(out)
}

/// `(dq_i/dt, dp_i/dt) = (dH/dp_i, -dH/dq_i)`.
pub fn hamilton_rhs(h: &PhasePolynomial) -> (Vec<PhasePolynomial>, Vec<PhasePolynomial>) {
    let dof = h.dof();
    let q_dot = (0..dof).map(|i| h.partial_derivative(Var::p(i)).expect("mode in range")).collect();
    let p_dot = (0..dof).map(|i| -&h.partial_derivative(Var::q(i)).expect("mode in range")).collect();
    (q_dot, p_dot)
}

/// Liouville series of standard mechanics: `A_{n+1} = {A_n, H} / (n + 1)`.
pub fn poisson_series(h: &PhasePolynomial, a: &PhasePolynomial, order: usize) -> Result<EvolutionSeries> {
    ensure_dof(h.dof(), a.dof())?;
    let mut coefficients = vec![a.clone()];
    for n in 0..order {
        let next = coefficients[n].poisson_bracket(h)?.scale(&ratio(1, n as i64 + 1));
        coefficients.push(next);
    }
    Ok(EvolutionSeries { coefficients })
}

/// Solves `i hbar dU/dt = H * U`, `U(0) = 1` order by order, plus the
/// inverse series from `V * U = 1`.
pub fn unitary_series(h: &PhasePolynomial, order: usize) -> Result<UnitarySeries> {
    let dof = h.dof();
    let mut u = vec![PhasePolynomial::one(dof)];
    for n in 0..order {
        // 1 / (i hbar (n+1)) = -i hbar^-1 / (n+1)
        let factor = Coefficient::term(-1, -GaussianRational::i())
            .scale_rational(&BigRational::new(BigInt::one(), BigInt::from(n + 1)));
        u.push(star(h, &u[n])?.scale(&factor));
    }
    let inverse = star_inverse(&u)?;
    Ok(UnitarySeries { coefficients: u, inverse })
}

/// Series `V` with `sum_{a+b=n} V_a * U_b = delta_n0`, given `U_0 = 1`.
pub fn star_inverse(u: &[PhasePolynomial]) -> Result<Vec<PhasePolynomial>> {
    let dof = u[0].dof();
    if u[0] != PhasePolynomial::one(dof) {
        return Err(Error::Precondition("series must start at 1".into()));
    }
    let mut v = vec![PhasePolynomial::one(dof)];
    for n in 1..u.len() {
        let mut acc = PhasePolynomial::zero(dof);
        for k in 0..n {
            acc = acc.add(&star(&v[k], &u[n - k])?)?;
        }
        v.push(-&acc);
    }
    Ok(v)
}

/// Truncated Cauchy product of two series under the star product.
pub fn star_series(left: &[PhasePolynomial], right: &[PhasePolynomial], order: usize) -> Result<Vec<PhasePolynomial>> {
    let dof = left[0].dof();
    let mut out = Vec::with_capacity(order + 1);
    for n in 0..=order {
        let mut acc = PhasePolynomial::zero(dof);
        for a in 0..=n {
            let (Some(l), Some(r)) = (left.get(a), right.get(n - a)) else { continue };
            acc = acc.add(&star(l, r)?)?;
        }
        out.push(acc);
    }
    Ok(out)
}

fn conjugate_unchecked(u: &UnitarySeries, a: &PhasePolynomial) -> Result<EvolutionSeries> {
    ensure_dof(u.coefficients[0].dof(), a.dof())?;
    let order = u.order();
    let left: Vec<PhasePolynomial> = u.inverse.iter().map(|v| star(v, a)).collect::<Result<_>>()?;
    let coefficients = star_series(&left, &u.coefficients, order)?;
    Ok(EvolutionSeries { coefficients })
}

/// `A(t) = U^{-1} * A * U` as a truncated series.
pub fn conjugate_by_unitary(u: &UnitarySeries, a: &PhasePolynomial) -> Result<EvolutionSeries> {
    let series = conjugate_unchecked(u, a)?;
    if !a.has_negative_hbar() {
        if let Some(n) = series.coefficients.iter().position(PhasePolynomial::has_negative_hbar) {
            return Err(Error::InternalConsistency(format!(
                "conjugated coefficient {n} retains a negative power of hbar"
            )));
        }
    }
    Ok(series)
}

/// Compares `U^{-1} * [A,B]_M * U` with `[U^{-1}*A*U, U^{-1}*B*U]_M`
/// coefficientwise through the series order.
pub fn canonical_invariance_check(u: &UnitarySeries, a: &PhasePolynomial, b: &PhasePolynomial) -> Result<bool> {
    ensure_dof(a.dof(), b.dof())?;
    let order = u.order();
    let lhs = conjugate_unchecked(u, &moyal_bracket(a, b)?)?;
    let at = conjugate_unchecked(u, a)?;
    let bt = conjugate_unchecked(u, b)?;
    for n in 0..=order {
        let mut rhs = PhasePolynomial::zero(a.dof());
        for k in 0..=n {
            rhs = rhs.add(&moyal_bracket(&at.coefficients[k], &bt.coefficients[n - k])?)?;
        }
        if rhs != lhs.coefficients[n] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Truncated `W * U` for `W = U*`; equals `[1, 0, 0, ...]` for real `H`.
pub fn unitarity_defect(u: &UnitarySeries) -> Result<Vec<PhasePolynomial>> {
    let dof = u.coefficients[0].dof();
    let mut product = star_series(&u.conjugate(), &u.coefficients, u.order())?;
    product[0] = product[0].sub(&PhasePolynomial::one(dof))?;
    Ok(product)
}

/// Rows `(t, moyal value, poisson value)` of the two truncated series
/// evaluated at a phase-space point.
pub fn trajectory(
    moyal: &EvolutionSeries,
    poisson: &EvolutionSeries,
    times: &[BigRational],
    point: &[BigRational],
    hbar: &BigRational,
) -> Result<Vec<(BigRational, GaussianRational, GaussianRational)>> {
    times.iter().map(|t| Ok((t.clone(), moyal.evaluate(t, point, hbar)?, poisson.evaluate(t, point, hbar)?))).collect()
}

pub fn is_zero_series(series: &[PhasePolynomial]) -> bool {
    series.iter().all(PhasePolynomial::is_zero)
}
