//! Star product and Moyal bracket on polynomial symbols, computed from the
//! terminating bidifferential series `A exp(i hbar J / 2) B` where
//! `J = sum_i (<-d/dq_i ->d/dp_i - <-d/dp_i ->d/dq_i)`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::Result;
use crate::phase::{ensure_dof, factorial, Monomial, PhasePolynomial};
use crate::scalar::{Coefficient, GaussianRational};

/// One term of the multinomial expansion of `J^n`: the left argument is
/// differentiated by `left`, the right argument by `right`, and the product
/// is weighted by `weight`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JanusTermIndex {
    pub n: u32,
    pub left: Monomial,
    pub right: Monomial,
    pub weight: BigInt,
}

type JanusCache = RwLock<HashMap<(u32, usize), Arc<Vec<JanusTermIndex>>>>;

fn cache() -> &'static JanusCache {
    static CACHE: OnceLock<JanusCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Expansion of `J^n` over `dof` modes. Each of the `n` factors picks a mode
/// and one of the two signed halves; `a_i` counts `(<-q_i, ->p_i)` picks and
/// `b_i` counts `(<-p_i, ->q_i)` picks, with weight
/// `n! / prod(a_i! b_i!) * (-1)^(sum b_i)`.
pub fn janus_terms(n: u32, dof: usize) -> Arc<Vec<JanusTermIndex>> {
    if let Some(hit) = cache().read().unwrap().get(&(n, dof)) {
        return Arc::clone(hit);
    }
    let mut terms = Vec::new();
    let mut slots = vec![0u32; 2 * dof];
    distribute(n, 0, &mut slots, &mut |slots| {
        let (a, b) = slots.split_at(dof);
        let denom: BigInt = slots.iter().map(|&k| factorial(k)).product();
        let sign_neg = b.iter().sum::<u32>() % 2 == 1;
        let mut weight = factorial(n) / denom;
        if sign_neg {
            weight = -weight;
        }
        terms.push(JanusTermIndex { n, left: Monomial::from_exps(a, b), right: Monomial::from_exps(b, a), weight });
    });
    let terms = Arc::new(terms);
    cache().write().unwrap().entry((n, dof)).or_insert_with(|| Arc::clone(&terms));
    terms
}

fn distribute(remaining: u32, slot: usize, slots: &mut [u32], emit: &mut impl FnMut(&[u32])) {
    if slot + 1 == slots.len() {
        slots[slot] = remaining;
        emit(slots);
        return;
    }
    for k in 0..=remaining {
        slots[slot] = k;
        distribute(remaining - k, slot + 1, slots, emit);
    }
    slots[slot] = 0;
}

/// `A J^n B`.
pub fn janus_power(a: &PhasePolynomial, b: &PhasePolynomial, n: u32) -> Result<PhasePolynomial> {
    ensure_dof(a.dof(), b.dof())?;
    let dof = a.dof();
    let mut out = PhasePolynomial::zero(dof);
    let (Some(da), Some(db)) = (a.degree(), b.degree()) else {
        return Ok(out);
    };
    if n > da.min(db) {
        return Ok(out);
    }
    for term in janus_terms(n, dof).iter() {
        let left = a.derivative_multi(&term.left)?;
        if left.is_zero() {
            continue;
        }
        let right = b.derivative_multi(&term.right)?;
        if right.is_zero() {
            continue;
        }
        let weight = Coefficient::from_rational(BigRational::from_integer(term.weight.clone()));
        out = out.add(&left.mul(&right)?.scale(&weight))?;
    }
    Ok(out)
}

/// `(i hbar / 2)^n / n!`.
fn star_weight(n: u32) -> Coefficient {
    let half_i = GaussianRational::new(BigRational::new(0.into(), 1.into()), BigRational::new(1.into(), 2.into()));
    Coefficient::term(n as i32, half_i.pow(n)).scale_rational(&BigRational::new(BigInt::one(), factorial(n)))
}

fn max_order(a: &PhasePolynomial, b: &PhasePolynomial) -> Option<u32> {
    Some(a.degree()?.min(b.degree()?))
}

/// `A * B = sum_n (i hbar/2)^n / n! A J^n B`, exact and finite.
pub fn star(a: &PhasePolynomial, b: &PhasePolynomial) -> Result<PhasePolynomial> {
    ensure_dof(a.dof(), b.dof())?;
    let mut out = PhasePolynomial::zero(a.dof());
    let Some(top) = max_order(a, b) else {
        return Ok(out);
    };
    for n in 0..=top {
        out = out.add(&janus_power(a, b, n)?.scale(&star_weight(n)))?;
    }
    Ok(out)
}

/// `[A, B]_M = 2i A sin(hbar J / 2) B`, i.e. twice the odd part of the star series.
pub fn moyal_bracket(a: &PhasePolynomial, b: &PhasePolynomial) -> Result<PhasePolynomial> {
    ensure_dof(a.dof(), b.dof())?;
    let mut out = PhasePolynomial::zero(a.dof());
    let Some(top) = max_order(a, b) else {
        return Ok(out);
    };
    let two = Coefficient::from_int(2);
    for n in (1..=top).step_by(2) {
        out = out.add(&janus_power(a, b, n)?.scale(&(&star_weight(n) * &two)))?;
    }
    Ok(out)
}

/// Left-to-right star product of a list of symbols.
pub fn star_all<'a>(dof: usize, factors: impl IntoIterator<Item = &'a PhasePolynomial>) -> Result<PhasePolynomial> {
    let mut acc = PhasePolynomial::one(dof);
    for f in factors {
        acc = star(&acc, f)?;
    }
    Ok(acc)
}
