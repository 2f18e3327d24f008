//! Symmetric dequantization (operator -> Weyl symbol) and its inverse, the
//! symmetric quantization (symbol -> operator).

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::operator::{OperatorPolynomial, SymmetricProducts, SymmetrizedExpansion};
use crate::phase::{Monomial, PhasePolynomial};
use crate::scalar::Coefficient;
use crate::star::star_all;

/// Expands `X` in symmetrized products and reads each `(O_i ... O_k)_+` as
/// the commutative monomial `O_i ... O_k`.
pub fn dequantize(x: &OperatorPolynomial) -> PhasePolynomial {
    x.symmetrize().to_symbol()
}

/// Same map, computed independently as `O_{i1} * ... * O_{ik}` (star
/// products of the letters) for every standard word.
pub fn dequantize_via_star(x: &OperatorPolynomial) -> Result<PhasePolynomial> {
    let dof = x.dof();
    let mut out = PhasePolynomial::zero(dof);
    for (word, c) in x.terms() {
        let letters: Vec<PhasePolynomial> = word.letters().into_iter().map(|v| PhasePolynomial::var(dof, v)).collect();
        out = out.add(&star_all(dof, &letters)?.scale(c))?;
    }
    Ok(out)
}

/// Maps every monomial to its completely symmetrized operator product.
pub fn quantize(a: &PhasePolynomial) -> OperatorPolynomial {
    SymmetrizedExpansion::from_symbol(a).reconstruct()
}

/// Checks that `X` equals its finite Weyl-ordered Taylor expansion about
/// `center`:
///
/// `X = sum_n 1/n! sum_{i1..in} d^n A/dO_i1..dO_in |_center (M_i1 ... M_in)_+`
///
/// with `A = dequantize(X)` and `M_i = O_i - center_i`. The sum over ordered
/// index tuples is collapsed to multi-indices `alpha` with weight `1/alpha!`.
pub fn taylor_identity_check(x: &OperatorPolynomial, center: &[BigRational]) -> Result<bool> {
    let dof = x.dof();
    if center.len() != 2 * dof {
        return Err(Error::Precondition(format!("center has {} entries, expected {}", center.len(), 2 * dof)));
    }
    let a = dequantize(x);
    let mut multi_indices = BTreeSet::new();
    for (m, _) in a.terms() {
        collect_divisors(m, &mut multi_indices);
    }
    let shift: Vec<Coefficient> = center.iter().map(|c| Coefficient::from_rational(c.clone())).collect();
    let mut products = SymmetricProducts::shifted(dof, &shift);
    let mut sum = OperatorPolynomial::zero(dof);
    for alpha in &multi_indices {
        let derivative = a.derivative_multi(alpha)?;
        let at_center = evaluate_variables(&derivative, center);
        if at_center.is_zero() {
            continue;
        }
        let weight = at_center.scale_rational(&BigRational::new(BigInt::one(), alpha.factorial()));
        sum = sum.add(&products.get(alpha).scale(&weight))?;
    }
    Ok(sum == *x)
}

fn collect_divisors(m: &Monomial, out: &mut BTreeSet<Monomial>) {
    let exps = m.flat().to_vec();
    let mut current = vec![0u32; exps.len()];
    loop {
        out.insert(Monomial::from_flat(current.clone()));
        let mut i = 0;
        loop {
            if i == exps.len() {
                return;
            }
            if current[i] < exps[i] {
                current[i] += 1;
                break;
            }
            current[i] = 0;
            i += 1;
        }
    }
}

/// Substitutes the phase-space variables, keeping hbar symbolic.
fn evaluate_variables(a: &PhasePolynomial, point: &[BigRational]) -> Coefficient {
    let mut acc = Coefficient::zero();
    for (m, c) in a.terms() {
        let value = m
            .flat()
            .iter()
            .zip(point)
            .fold(BigRational::one(), |v, (&e, x)| v * num_traits::pow::pow(x.clone(), e as usize));
        acc += &c.scale_rational(&value);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    fn q() -> OperatorPolynomial {
        OperatorPolynomial::q(1, 0)
    }

    fn p() -> OperatorPolynomial {
        OperatorPolynomial::p(1, 0)
    }

    fn cq() -> PhasePolynomial {
        PhasePolynomial::q(1, 0)
    }

    fn cp() -> PhasePolynomial {
        PhasePolynomial::p(1, 0)
    }

    fn hbar_const(k: i32, r: BigRational) -> PhasePolynomial {
        PhasePolynomial::constant(1, Coefficient::hbar_pow(k).scale_rational(&r))
    }

    #[test]
    fn dequantize_examples() {
        let pq = &p() * &q();
        let expected =
            &(&cq() * &cp()) - &PhasePolynomial::constant(1, Coefficient::i_hbar().scale_rational(&rat(1, 2)));
        assert_eq!(dequantize(&pq), expected);

        let a = &(&(&q() * &p()) * &p()) * &q();
        let q2p2 = &cq().pow(2) * &cp().pow(2);
        assert_eq!(dequantize(&a), &q2p2 + &hbar_const(2, rat(1, 2)));
        assert_eq!(dequantize_via_star(&a).unwrap(), dequantize(&a));

        let b =
            (&(&q().pow(2) * &p().pow(2)) + &(&p().pow(2) * &q().pow(2))).scale(&Coefficient::from_rational(rat(1, 2)));
        assert_eq!(dequantize(&b), &q2p2 - &hbar_const(2, rat(1, 2)));
    }

    #[test]
    fn quantize_examples() {
        let q2p = &cq().pow(2) * &cp();
        assert_eq!(quantize(&q2p), &(&q().pow(2) * &p()) - &q().scale(&Coefficient::i_hbar()));
        assert_eq!(quantize(&PhasePolynomial::one(1)), OperatorPolynomial::identity(1));
        let qp = &cq() * &cp();
        let expected =
            &(&q() * &p()) - &OperatorPolynomial::constant(1, Coefficient::i_hbar().scale_rational(&rat(1, 2)));
        assert_eq!(quantize(&qp), expected);
    }

    #[test]
    fn taylor_examples() {
        let qp = &q() * &p();
        assert!(taylor_identity_check(&qp, &[rat_int(0), rat_int(0)]).unwrap());
        let x = &(&q().pow(2) * &p()) - &q().scale(&Coefficient::i_hbar());
        assert!(taylor_identity_check(&x, &[rat_int(1), rat_int(2)]).unwrap());
        assert!(taylor_identity_check(&OperatorPolynomial::identity(1), &[rat(3, 7), rat(-2, 5)]).unwrap());
        assert!(taylor_identity_check(&qp, &[rat_int(0)]).is_err());
    }
}
