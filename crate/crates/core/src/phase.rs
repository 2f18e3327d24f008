//! Classical observables: commutative polynomials in `q_i, p_i` over the
//! hbar-Laurent scalar ring, with derivatives and the Poisson bracket.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Coefficient, GaussianRational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    Q,
    P,
}

/// A canonical variable `q_mode` or `p_mode`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub kind: VarKind,
    pub mode: usize,
}

impl Var {
    pub fn q(mode: usize) -> Self {
        Var { kind: VarKind::Q, mode }
    }

    pub fn p(mode: usize) -> Self {
        Var { kind: VarKind::P, mode }
    }

    /// Flat index in `0..2N`: `q_i -> i`, `p_i -> N + i`.
    pub fn index(&self, dof: usize) -> usize {
        match self.kind {
            VarKind::Q => self.mode,
            VarKind::P => dof + self.mode,
        }
    }

    pub fn from_index(index: usize, dof: usize) -> Result<Self> {
        if index < dof {
            Ok(Var::q(index))
        } else if index < 2 * dof {
            Ok(Var::p(index - dof))
        } else {
            Err(Error::IndexOutOfRange { index, dof })
        }
    }

    /// The canonically conjugate partner.
    pub fn partner(&self) -> Self {
        match self.kind {
            VarKind::Q => Var::p(self.mode),
            VarKind::P => Var::q(self.mode),
        }
    }

    pub fn check(&self, dof: usize) -> Result<()> {
        if self.mode < dof {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: self.mode, dof })
        }
    }

    /// Every variable for `dof` modes, in flat-index order.
    pub fn all(dof: usize) -> impl Iterator<Item = Var> {
        (0..dof).map(Var::q).chain((0..dof).map(Var::p))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            VarKind::Q => write!(f, "q{}", self.mode),
            VarKind::P => write!(f, "p{}", self.mode),
        }
    }
}

/// Exponent vector `(q_0..q_{N-1}, p_0..p_{N-1})`.
///
/// Ordering is the canonical one: higher total degree first, then larger
/// q-exponents, then larger p-exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn one(dof: usize) -> Self {
        Monomial { exps: vec![0; 2 * dof] }
    }

    pub fn from_exps(q: &[u32], p: &[u32]) -> Self {
        assert_eq!(q.len(), p.len(), "q and p exponent vectors differ in length");
        let mut exps = q.to_vec();
        exps.extend_from_slice(p);
        Monomial { exps }
    }

    pub fn from_flat(exps: Vec<u32>) -> Self {
        assert!(exps.len().is_multiple_of(2), "flat exponent vector must have even length");
        Monomial { exps }
    }

    pub fn var(dof: usize, v: Var) -> Self {
        let mut m = Self::one(dof);
        m.exps[v.index(dof)] = 1;
        m
    }

    pub fn dof(&self) -> usize {
        self.exps.len() / 2
    }

    pub fn q(&self) -> &[u32] {
        &self.exps[..self.dof()]
    }

    pub fn p(&self) -> &[u32] {
        &self.exps[self.dof()..]
    }

    pub fn flat(&self) -> &[u32] {
        &self.exps
    }

    pub fn exp(&self, v: Var) -> u32 {
        self.exps[v.index(self.dof())]
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial { exps: self.exps.iter().zip(&o.exps).map(|(a, b)| a + b).collect() }
    }

    pub fn with_exp(&self, v: Var, e: u32) -> Monomial {
        let mut m = self.clone();
        let idx = v.index(self.dof());
        m.exps[idx] = e;
        m
    }

    /// `self / o` when `o` divides `self`.
    pub fn checked_div(&self, o: &Monomial) -> Option<Monomial> {
        let mut exps = Vec::with_capacity(self.exps.len());
        for (a, b) in self.exps.iter().zip(&o.exps) {
            exps.push(a.checked_sub(*b)?);
        }
        Some(Monomial { exps })
    }

    /// Variables with multiplicity in canonical letter order
    /// (`q_0.. q_{N-1}` then `p_0.. p_{N-1}`).
    pub fn letters(&self) -> Vec<Var> {
        let dof = self.dof();
        let mut out = Vec::with_capacity(self.degree() as usize);
        for v in Var::all(dof) {
            for _ in 0..self.exp(v) {
                out.push(v);
            }
        }
        out
    }

    /// Product of `exp!` over all exponents.
    pub fn factorial(&self) -> BigInt {
        self.exps.iter().map(|&e| factorial(e)).product()
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        o.degree().cmp(&self.degree()).then_with(|| o.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `n (n-1) ... (n-k+1)`.
pub fn falling_factorial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (n - k + 1..=n).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    falling_factorial(n, k) / factorial(k)
}

/// A commutative polynomial in `q_i, p_i` with [`Coefficient`] coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PhasePolynomial {
    dof: usize,
    terms: BTreeMap<Monomial, Coefficient>,
}

pub(crate) fn ensure_dof(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::DofMismatch { left, right })
    }
}

impl PhasePolynomial {
    pub fn zero(dof: usize) -> Self {
        assert!(dof > 0, "degrees of freedom must be positive");
        PhasePolynomial { dof, terms: BTreeMap::new() }
    }

    pub fn one(dof: usize) -> Self {
        Self::constant(dof, Coefficient::one())
    }

    pub fn constant(dof: usize, c: Coefficient) -> Self {
        Self::from_term(Monomial::one(dof), c)
    }

    pub fn from_int(dof: usize, n: i64) -> Self {
        Self::constant(dof, Coefficient::from_int(n))
    }

    pub fn hbar(dof: usize) -> Self {
        Self::constant(dof, Coefficient::hbar())
    }

    pub fn var(dof: usize, v: Var) -> Self {
        assert!(v.mode < dof, "variable {v} out of range for dof {dof}");
        Self::from_term(Monomial::var(dof, v), Coefficient::one())
    }

    pub fn q(dof: usize, mode: usize) -> Self {
        Self::var(dof, Var::q(mode))
    }

    pub fn p(dof: usize, mode: usize) -> Self {
        Self::var(dof, Var::p(mode))
    }

    pub fn from_term(m: Monomial, c: Coefficient) -> Self {
        let dof = m.dof();
        let mut out = Self::zero(dof);
        out.add_term(m, &c);
        out
    }

    pub fn from_terms(dof: usize, terms: impl IntoIterator<Item = (Monomial, Coefficient)>) -> Self {
        let mut out = Self::zero(dof);
        for (m, c) in terms {
            assert_eq!(m.dof(), dof, "monomial dof mismatch");
            out.add_term(m, &c);
        }
        out
    }

    pub fn dof(&self) -> usize {
        self.dof
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coefficient)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Coefficient {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Total degree in the phase-space variables; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Smallest hbar power over all coefficients.
    pub fn min_hbar_power(&self) -> Option<i32> {
        self.terms.values().filter_map(Coefficient::min_power).min()
    }

    pub fn max_hbar_power(&self) -> Option<i32> {
        self.terms.values().filter_map(Coefficient::max_power).max()
    }

    pub fn has_negative_hbar(&self) -> bool {
        self.min_hbar_power().is_some_and(|k| k < 0)
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(Coefficient::is_real)
    }

    pub fn add_term(&mut self, m: Monomial, c: &Coefficient) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.dof(), self.dof);
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        ensure_dof(self.dof, o.dof)?;
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        ensure_dof(self.dof, o.dof)?;
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), &-c);
        }
        Ok(out)
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        ensure_dof(self.dof, o.dof)?;
        let mut out = Self::zero(self.dof);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), &(c1 * c2));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Coefficient) -> Self {
        let mut out = Self::zero(self.dof);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), &(v * c));
        }
        out
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        self.scale(&Coefficient::from_rational(r.clone()))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.dof);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn map_coefficients(&self, f: impl Fn(&Coefficient) -> Coefficient) -> Self {
        let mut out = Self::zero(self.dof);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &f(c));
        }
        out
    }

    /// Complex conjugation of every coefficient (hbar stays real).
    pub fn conjugate(&self) -> Self {
        self.map_coefficients(Coefficient::conj)
    }

    /// Substitutes `hbar -> -hbar` in every coefficient.
    pub fn flip_hbar(&self) -> Self {
        self.map_coefficients(Coefficient::flip_hbar)
    }

    /// The polynomial multiplying `hbar^k`.
    pub fn hbar_component(&self, k: i32) -> Self {
        self.map_coefficients(|c| Coefficient::constant(c.get(k)))
    }

    pub fn partial_derivative(&self, v: Var) -> Result<Self> {
        v.check(self.dof)?;
        let idx = v.index(self.dof);
        let mut out = Self::zero(self.dof);
        for (m, c) in &self.terms {
            let e = m.flat()[idx];
            if e == 0 {
                continue;
            }
            let dm = m.with_exp(v, e - 1);
            out.add_term(dm, &c.scale_rational(&BigRational::from_integer(BigInt::from(e))));
        }
        Ok(out)
    }

    /// `d^alpha A`, the mixed partial with multiplicities from `alpha`.
    pub fn derivative_multi(&self, alpha: &Monomial) -> Result<Self> {
        ensure_dof(self.dof, alpha.dof())?;
        let mut out = Self::zero(self.dof);
        for (m, c) in &self.terms {
            let Some(rest) = m.checked_div(alpha) else { continue };
            let factor: BigInt = m.flat().iter().zip(alpha.flat()).map(|(&e, &k)| falling_factorial(e, k)).product();
            out.add_term(rest, &c.scale_rational(&BigRational::from_integer(factor)));
        }
        Ok(out)
    }

    /// `{A, B} = sum_i dA/dq_i dB/dp_i - dA/dp_i dB/dq_i`.
    pub fn poisson_bracket(&self, o: &Self) -> Result<Self> {
        ensure_dof(self.dof, o.dof)?;
        let mut out = Self::zero(self.dof);
        for i in 0..self.dof {
            let a_q = self.partial_derivative(Var::q(i))?;
            let a_p = self.partial_derivative(Var::p(i))?;
            let b_q = o.partial_derivative(Var::q(i))?;
            let b_p = o.partial_derivative(Var::p(i))?;
            out = out.add(&a_q.mul(&b_p)?)?.sub(&a_p.mul(&b_q)?)?;
        }
        Ok(out)
    }

    /// Exact substitution of a phase-space point (`q_0..q_{N-1}, p_0..p_{N-1}`)
    /// and a value of hbar.
    pub fn evaluate(&self, point: &[BigRational], hbar: &BigRational) -> Result<GaussianRational> {
        if point.len() != 2 * self.dof {
            return Err(Error::Precondition(format!(
                "evaluation point has {} entries, expected {}",
                point.len(),
                2 * self.dof
            )));
        }
        let mut acc = GaussianRational::zero();
        for (m, c) in &self.terms {
            let value: BigRational = m
                .flat()
                .iter()
                .zip(point)
                .map(|(&e, x)| num_traits::pow::pow(x.clone(), e as usize))
                .fold(BigRational::one(), |a, b| a * b);
            acc += &c.evaluate(hbar)?.scale(&value);
        }
        Ok(acc)
    }

    /// Replaces hbar by a rational value, leaving the variables symbolic.
    pub fn substitute_hbar(&self, hbar: &BigRational) -> Result<Self> {
        let mut out = Self::zero(self.dof);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &Coefficient::constant(c.evaluate(hbar)?));
        }
        Ok(out)
    }

    /// Drops every term carrying a positive power of hbar.
    pub fn hbar_limit_zero(&self) -> Result<Self> {
        if let Some(k) = self.min_hbar_power().filter(|k| *k < 0) {
            return Err(Error::LimitUndefined(k));
        }
        Ok(self.map_coefficients(|c| c.truncate_below(1)))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl<'a> $tr<&'a PhasePolynomial> for &'a PhasePolynomial {
            type Output = PhasePolynomial;
            /// Panics on a degrees-of-freedom mismatch; use the named method
            /// for a checked version.
            fn $method(self, o: &PhasePolynomial) -> PhasePolynomial {
                PhasePolynomial::$method(self, o).expect("dof mismatch")
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for &PhasePolynomial {
    type Output = PhasePolynomial;
    fn neg(self) -> PhasePolynomial {
        self.map_coefficients(|c| -c)
    }
}

impl fmt::Display for PhasePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::render_classical(self))
    }
}
