//! The noncommutative operator algebra generated by `Q_i, P_i` subject to
//! `[Q_i, P_j] = i hbar delta_ij`.
//!
//! Every operator is kept in standard order: inside each word all `Q`
//! letters precede all `P` letters and letters of the same kind are sorted by
//! mode. A standard-ordered word is therefore determined by its exponent
//! vector, and the algebra reuses [`Monomial`] as the word key.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::phase::{binomial, ensure_dof, factorial, Monomial, PhasePolynomial, Var, VarKind};
use crate::scalar::{Coefficient, GaussianRational};

/// An arbitrary (not necessarily ordered) product of canonical operators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct OperatorWord {
    pub letters: Vec<Var>,
}

impl OperatorWord {
    pub fn new(letters: Vec<Var>) -> Self {
        OperatorWord { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Standard order: all Q before all P, modes ascending within a kind.
    pub fn is_standard(&self) -> bool {
        self.letters.windows(2).all(|w| w[0] <= w[1])
    }
}

/// Half the commutator of two canonical letters, `[a, b] / 2`, a c-number.
pub fn half_commutator(a: Var, b: Var) -> Coefficient {
    if a.mode != b.mode || a.kind == b.kind {
        return Coefficient::zero();
    }
    let half = GaussianRational::new(BigRational::new(0.into(), 1.into()), BigRational::new(1.into(), 2.into()));
    match a.kind {
        VarKind::Q => Coefficient::term(1, half),
        VarKind::P => Coefficient::term(1, -half),
    }
}

/// A quantum observable in standard-ordered normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OperatorPolynomial {
    dof: usize,
    terms: BTreeMap<Monomial, Coefficient>,
}

impl OperatorPolynomial {
    pub fn zero(dof: usize) -> Self {
        assert!(dof > 0, "degrees of freedom must be positive");
        OperatorPolynomial { dof, terms: BTreeMap::new() }
    }

    pub fn identity(dof: usize) -> Self {
        Self::constant(dof, Coefficient::one())
    }

    pub fn constant(dof: usize, c: Coefficient) -> Self {
        Self::from_term(Monomial::one(dof), c)
    }

    pub fn letter(dof: usize, v: Var) -> Self {
        assert!(v.mode < dof, "operator {v} out of range for dof {dof}");
        Self::from_term(Monomial::var(dof, v), Coefficient::one())
    }

    pub fn q(dof: usize, mode: usize) -> Self {
        Self::letter(dof, Var::q(mode))
    }

    pub fn p(dof: usize, mode: usize) -> Self {
        Self::letter(dof, Var::p(mode))
    }

    /// The standard-ordered word with the given exponents.
    pub fn from_term(m: Monomial, c: Coefficient) -> Self {
        let mut out = Self::zero(m.dof());
        out.add_term(m, &c);
        out
    }

    pub fn from_terms(dof: usize, terms: impl IntoIterator<Item = (Monomial, Coefficient)>) -> Self {
        let mut out = Self::zero(dof);
        for (m, c) in terms {
            assert_eq!(m.dof(), dof, "word dof mismatch");
            out.add_term(m, &c);
        }
        out
    }

    /// Normal form of an arbitrary ordered word.
    pub fn from_word(dof: usize, word: &OperatorWord) -> Result<Self> {
        let mut acc = Self::identity(dof);
        for v in &word.letters {
            v.check(dof)?;
            acc = acc.mul(&Self::letter(dof, *v))?;
        }
        Ok(acc)
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

    /// Standard-ordered words with their coefficients, canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coefficient)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Coefficient {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn min_hbar_power(&self) -> Option<i32> {
        self.terms.values().filter_map(Coefficient::min_power).min()
    }

    pub fn has_negative_hbar(&self) -> bool {
        self.min_hbar_power().is_some_and(|k| k < 0)
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

    pub fn scale(&self, c: &Coefficient) -> Self {
        let mut out = Self::zero(self.dof);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), &(v * c));
        }
        out
    }

    pub fn map_coefficients(&self, f: impl Fn(&Coefficient) -> Coefficient) -> Self {
        let mut out = Self::zero(self.dof);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &f(c));
        }
        out
    }

    pub fn substitute_hbar(&self, hbar: &BigRational) -> Result<Self> {
        let mut out = Self::zero(self.dof);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &Coefficient::constant(c.evaluate(hbar)?));
        }
        Ok(out)
    }

    /// Ordered product, rewritten to standard order with
    /// `P_i Q_j = Q_j P_i - i hbar delta_ij`.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        ensure_dof(self.dof, o.dof)?;
        let mut out = Self::zero(self.dof);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let coeff = c1 * c2;
                for (m, k) in word_product(m1, m2) {
                    out.add_term(m, &(&coeff * &k));
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::identity(self.dof);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn commutator(&self, o: &Self) -> Result<Self> {
        self.mul(o)?.sub(&o.mul(self)?)
    }

    /// Hermitian adjoint: reverse every word, conjugate every coefficient,
    /// and restore standard order.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zero(self.dof);
        for (m, c) in &self.terms {
            let zeros = vec![0; self.dof];
            let p_part = Monomial::from_exps(&zeros, m.p());
            let q_part = Monomial::from_exps(m.q(), &zeros);
            let cbar = c.conj();
            for (w, k) in word_product(&p_part, &q_part) {
                out.add_term(w, &(&cbar * &k));
            }
        }
        out
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.dagger() == *self
    }

    /// Expansion in the basis of completely symmetrized products.
    pub fn symmetrize(&self) -> SymmetrizedExpansion {
        let mut memo: HashMap<Monomial, BTreeMap<Monomial, Coefficient>> = HashMap::new();
        let mut out = SymmetrizedExpansion::zero(self.dof);
        for (m, c) in &self.terms {
            let letters = m.letters();
            let expansion = symmetrize_suffix(self.dof, &letters, &mut memo);
            for (basis, k) in expansion {
                out.add_term(basis.clone(), &(c * k));
            }
        }
        out
    }
}

/// Symmetrized expansion of the standard word spelled by `letters`.
///
/// Peels the leading letter with
/// `O_i (W)_+ = (O_i W)_+ + sum_j [O_i, O_j]/2 (W \ O_j)_+`, so
/// `O_i * sum_m c_m (m)_+ = sum_m c_m ((m + e_i)_+ + sum_j m_j [i, j]/2 (m - e_j)_+)`.
fn symmetrize_suffix<'a>(
    dof: usize,
    letters: &[Var],
    memo: &'a mut HashMap<Monomial, BTreeMap<Monomial, Coefficient>>,
) -> &'a BTreeMap<Monomial, Coefficient> {
    let key = word_monomial(dof, letters);
    if !memo.contains_key(&key) {
        let value = match letters.split_first() {
            None => BTreeMap::from([(Monomial::one(dof), Coefficient::one())]),
            Some((&head, rest)) => {
                let tail = symmetrize_suffix(dof, rest, memo).clone();
                let partner = head.partner();
                let contraction = half_commutator(head, partner);
                let mut acc: BTreeMap<Monomial, Coefficient> = BTreeMap::new();
                let mut push = |m: Monomial, c: Coefficient| {
                    let entry = acc.entry(m.clone()).or_default();
                    *entry += &c;
                    if entry.is_zero() {
                        acc.remove(&m);
                    }
                };
                for (m, c) in &tail {
                    push(m.mul(&Monomial::var(dof, head)), c.clone());
                    let count = m.exp(partner);
                    if count > 0 {
                        let lowered = m.with_exp(partner, count - 1);
                        let k = contraction.scale_rational(&BigRational::from_integer(BigInt::from(count)));
                        push(lowered, c * &k);
                    }
                }
                acc
            }
        };
        memo.insert(key.clone(), value);
    }
    &memo[&key]
}

fn word_monomial(dof: usize, letters: &[Var]) -> Monomial {
    let mut exps = vec![0u32; 2 * dof];
    for v in letters {
        exps[v.index(dof)] += 1;
    }
    Monomial::from_flat(exps)
}

/// Product of two standard-ordered words as a list of standard words with
/// c-number weights. Modes are independent; within mode `k`,
/// `P^b Q^c = sum_j j! C(b,j) C(c,j) (-i hbar)^j Q^(c-j) P^(b-j)`.
fn word_product(left: &Monomial, right: &Monomial) -> Vec<(Monomial, Coefficient)> {
    let dof = left.dof();
    let (lq, lp, rq, rp) = (left.q(), left.p(), right.q(), right.p());
    let mut out = vec![(vec![0u32; dof], BigInt::from(1), 0u32)];
    for k in 0..dof {
        let max_j = lp[k].min(rq[k]);
        let mut next = Vec::with_capacity(out.len() * (max_j as usize + 1));
        for (js, weight, total) in &out {
            for j in 0..=max_j {
                let w = factorial(j) * binomial(lp[k], j) * binomial(rq[k], j);
                let mut js2 = js.clone();
                js2[k] = j;
                next.push((js2, weight * w, total + j));
            }
        }
        out = next;
    }
    let minus_i = -GaussianRational::i();
    out.into_iter()
        .map(|(js, weight, total)| {
            let q: Vec<u32> = (0..dof).map(|k| lq[k] + rq[k] - js[k]).collect();
            let p: Vec<u32> = (0..dof).map(|k| lp[k] + rp[k] - js[k]).collect();
            let c = Coefficient::term(total as i32, minus_i.pow(total).scale(&BigRational::from_integer(weight)));
            (Monomial::from_exps(&q, &p), c)
        })
        .collect()
}

/// The expansion `sum_m c_m (m)_+` of an operator in symmetrized products;
/// each basis element is indexed by its commutative monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetrizedExpansion {
    dof: usize,
    terms: BTreeMap<Monomial, Coefficient>,
}

impl SymmetrizedExpansion {
    pub fn zero(dof: usize) -> Self {
        SymmetrizedExpansion { dof, terms: BTreeMap::new() }
    }

    pub fn dof(&self) -> usize {
        self.dof
    }

    pub fn add_term(&mut self, m: Monomial, c: &Coefficient) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coefficient)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Relabels each symmetrized product as the commutative monomial.
    pub fn to_symbol(&self) -> PhasePolynomial {
        PhasePolynomial::from_terms(self.dof, self.terms.iter().map(|(m, c)| (m.clone(), c.clone())))
    }

    /// Builds the expansion whose coefficients are those of a symbol.
    pub fn from_symbol(a: &PhasePolynomial) -> Self {
        let mut out = Self::zero(a.dof());
        for (m, c) in a.terms() {
            out.add_term(m.clone(), c);
        }
        out
    }

    /// Expands every symmetrized product back into normal form.
    pub fn reconstruct(&self) -> OperatorPolynomial {
        let mut products = SymmetricProducts::new(self.dof);
        let mut out = OperatorPolynomial::zero(self.dof);
        for (m, c) in &self.terms {
            let prod = products.get(m).scale(c);
            out = &out + &prod;
        }
        out
    }
}

/// Memoized normal forms of symmetrized products `(M_1 ... M_k)_+` whose
/// letters are `M_v = O_v - shift_v` (no shift for the plain basis).
///
/// Uses `(O_i W)_+ = O_i (W)_+ - sum_j [O_i, O_j]/2 (W \ O_j)_+`.
pub struct SymmetricProducts {
    dof: usize,
    letters: Vec<OperatorPolynomial>,
    memo: HashMap<Monomial, OperatorPolynomial>,
}

impl SymmetricProducts {
    pub fn new(dof: usize) -> Self {
        let letters = Var::all(dof).map(|v| OperatorPolynomial::letter(dof, v)).collect();
        SymmetricProducts { dof, letters, memo: HashMap::new() }
    }

    /// Letters shifted by c-numbers: `M_v = O_v - shift[v]`, flat order.
    pub fn shifted(dof: usize, shift: &[Coefficient]) -> Self {
        assert_eq!(shift.len(), 2 * dof, "shift needs one entry per canonical variable");
        let letters = Var::all(dof)
            .zip(shift)
            .map(|(v, c)| {
                OperatorPolynomial::letter(dof, v).sub(&OperatorPolynomial::constant(dof, c.clone())).unwrap()
            })
            .collect();
        SymmetricProducts { dof, letters, memo: HashMap::new() }
    }

    pub fn get(&mut self, m: &Monomial) -> OperatorPolynomial {
        if let Some(v) = self.memo.get(m) {
            return v.clone();
        }
        let value = match m.letters().first().copied() {
            None => OperatorPolynomial::identity(self.dof),
            Some(head) => {
                let rest = m.with_exp(head, m.exp(head) - 1);
                let letter = self.letters[head.index(self.dof)].clone();
                let mut acc = &letter * &self.get(&rest);
                let partner = head.partner();
                let count = rest.exp(partner);
                if count > 0 {
                    let lowered = rest.with_exp(partner, count - 1);
                    let k =
                        half_commutator(head, partner).scale_rational(&BigRational::from_integer(BigInt::from(count)));
                    acc = &acc - &self.get(&lowered).scale(&k);
                }
                acc
            }
        };
        self.memo.insert(m.clone(), value.clone());
        value
    }
}

/// Coefficients `(i/hbar)^n / n! [H, [H, ... [H, A]]]` for `n = 0..=order`.
pub fn op_heisenberg_series(
    h: &OperatorPolynomial,
    a: &OperatorPolynomial,
    order: usize,
) -> Result<Vec<OperatorPolynomial>> {
    ensure_dof(h.dof, a.dof)?;
    let mut nested = a.clone();
    let mut out = vec![a.clone()];
    for n in 1..=order {
        nested = h.commutator(&nested)?;
        let prefactor = Coefficient::term(-(n as i32), GaussianRational::i().pow(n as u32))
            .scale_rational(&BigRational::new(1.into(), factorial(n as u32)));
        let term = nested.scale(&prefactor);
        if term.has_negative_hbar() {
            return Err(Error::InternalConsistency(format!(
                "Heisenberg coefficient {n} carries a negative power of hbar"
            )));
        }
        out.push(term);
    }
    Ok(out)
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl<'a> $tr<&'a OperatorPolynomial> for &'a OperatorPolynomial {
            type Output = OperatorPolynomial;
            /// Panics on a degrees-of-freedom mismatch.
            fn $method(self, o: &OperatorPolynomial) -> OperatorPolynomial {
                OperatorPolynomial::$method(self, o).expect("dof mismatch")
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for &OperatorPolynomial {
    type Output = OperatorPolynomial;
    fn neg(self) -> OperatorPolynomial {
        self.map_coefficients(|c| -c)
    }
}

impl fmt::Display for OperatorPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::render_operator(self))
    }
}
