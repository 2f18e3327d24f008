mod common;

use proptest::prelude::*;

use common::*;
use weylstar::scalar::Coefficient;
use weylstar::{parse_operator, OperatorPolynomial, OperatorWord, Var};

fn op_shape(dof: usize) -> Shape {
    Shape::new(dof, 4, 3).hbar(-1, 1).complex()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// Random rewriting orders all reach the library's normal form.
    #[test]
    fn normal_form_is_confluent(seed in any::<u64>(), dof in 1usize..=2) {
        let mut rng = rng(seed);
        let word = random_word(&mut rng, dof, 8);
        let expected = OperatorPolynomial::from_word(dof, &OperatorWord::new(word.clone())).unwrap();
        for _ in 0..3 {
            let got = rewrite_normal_order(&mut rng, dof, vec![(word.clone(), Coefficient::one())]);
            prop_assert_eq!(&got, &expected);
        }
        // Idempotence: a normal form is its own normal form.
        let mut again = OperatorPolynomial::zero(dof);
        for (m, c) in expected.terms() {
            let letters = m.letters();
            again = &again + &OperatorPolynomial::from_word(dof, &OperatorWord::new(letters)).unwrap().scale(c);
        }
        prop_assert_eq!(again, expected);
    }

    /// Each contraction removes two letters and contributes one power of hbar.
    #[test]
    fn hbar_grading(seed in any::<u64>(), dof in 1usize..=2) {
        let mut rng = rng(seed);
        let word = random_word(&mut rng, dof, 8);
        let x = OperatorPolynomial::from_word(dof, &OperatorWord::new(word.clone())).unwrap();
        for (m, c) in x.terms() {
            let k = (word.len() as u32 - m.degree()) / 2;
            prop_assert_eq!((word.len() as u32 - m.degree()) % 2, 0);
            prop_assert_eq!(c.min_power(), Some(k as i32));
            prop_assert_eq!(c.max_power(), Some(k as i32));
        }
    }

    #[test]
    fn product_is_associative(seed in any::<u64>(), dof in 1usize..=2) {
        let mut rng = rng(seed);
        let s = op_shape(dof);
        let (x, y, z) = (random_operator(&mut rng, &s), random_operator(&mut rng, &s), random_operator(&mut rng, &s));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
    }

    #[test]
    fn dagger_laws(seed in any::<u64>(), dof in 1usize..=2) {
        let mut rng = rng(seed);
        let s = op_shape(dof);
        let (x, y) = (random_operator(&mut rng, &s), random_operator(&mut rng, &s));
        prop_assert_eq!(x.dagger().dagger(), x.clone());
        prop_assert_eq!((&x * &y).dagger(), &y.dagger() * &x.dagger());
        let h = &x + &x.dagger();
        prop_assert!(h.is_self_adjoint());
    }

    #[test]
    fn symmetrize_round_trip(seed in any::<u64>(), dof in 1usize..=2) {
        let mut rng = rng(seed);
        let x = random_operator(&mut rng, &Shape::new(dof, 6, 3).hbar(-1, 1).complex());
        prop_assert_eq!(x.symmetrize().reconstruct(), x);
    }

    /// The symmetric basis element `(m)_+` equals the average over all
    /// orderings of its letters, so summing those averages with the
    /// symmetrized coefficients rebuilds the word.
    #[test]
    fn symmetrize_matches_permutation_averaging(seed in any::<u64>(), dof in 1usize..=2) {
        let mut rng = rng(seed);
        let word = random_word(&mut rng, dof, 6);
        let x = OperatorPolynomial::from_word(dof, &OperatorWord::new(word.clone())).unwrap();
        let expansion = x.symmetrize();
        let mut rebuilt = OperatorPolynomial::zero(dof);
        for (m, c) in expansion.terms() {
            prop_assert_eq!((word.len() as u32 - m.degree()) % 2, 0);
            rebuilt = &rebuilt + &permutation_average(&mut rng, dof, m).scale(c);
        }
        prop_assert_eq!(rebuilt, x);
    }
}

#[test]
fn canonical_commutators() {
    for dof in 1..=3 {
        for i in 0..dof {
            for j in 0..dof {
                let (qi, qj) = (OperatorPolynomial::q(dof, i), OperatorPolynomial::q(dof, j));
                let (pi, pj) = (OperatorPolynomial::p(dof, i), OperatorPolynomial::p(dof, j));
                assert!(qi.commutator(&qj).unwrap().is_zero());
                assert!(pi.commutator(&pj).unwrap().is_zero());
                let expected = if i == j {
                    OperatorPolynomial::constant(dof, Coefficient::i_hbar())
                } else {
                    OperatorPolynomial::zero(dof)
                };
                assert_eq!(qi.commutator(&pj).unwrap(), expected);
            }
        }
    }
}

#[test]
fn parsed_examples() {
    let x = parse_operator("Q0*P0^2*Q0", 1).unwrap();
    let mut rng = rng(1);
    let oracle =
        rewrite_normal_order(&mut rng, 1, vec![(vec![Var::q(0), Var::p(0), Var::p(0), Var::q(0)], Coefficient::one())]);
    assert_eq!(x, oracle);
    assert!(parse_operator("Q0*P1 - P1*Q0", 2).unwrap().is_zero());
    let y = parse_operator("Q0^2*P0^2 - P0^2*Q0^2", 1).unwrap();
    assert_eq!(y, parse_operator("4*i*hbar*Q0*P0 + 2*hbar^2", 1).unwrap());
}

#[test]
fn symmetrized_degrees_drop_by_two() {
    let x = parse_operator("P0*Q0*P0*Q0*P0", 1).unwrap();
    let degrees: std::collections::BTreeSet<u32> = x.symmetrize().terms().map(|(m, _)| m.degree()).collect();
    assert!(degrees.iter().all(|d| [5, 3, 1].contains(d)));
    assert!(degrees.contains(&5));
}
