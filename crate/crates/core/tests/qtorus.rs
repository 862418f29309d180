use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use monodromy::poly::Poly;
use monodromy::qtorus::{Algebra, QElement, QTerm};
use monodromy::ring::Ring;

fn algebra() -> Arc<Algebra> {
    Algebra::new(
        vec!["a".into(), "b".into(), "c".into()],
        vec!["w".into()],
        vec![vec![0, 1, -2], vec![-1, 0, 1], vec![2, -1, 0]],
    )
    .unwrap()
}

fn raw_terms() -> impl Strategy<Value = Vec<QTerm>> {
    let term = (prop::collection::vec(-2i32..=2, 4), -3i32..=3, -3i64..=3)
        .prop_map(|(exps, q, c)| QTerm { q, exps, coeff: c.to_string() });
    prop::collection::vec(term, 1..=3)
}

fn element() -> impl Strategy<Value = QElement> {
    raw_terms().prop_map(|t| QElement::from_terms(&algebra(), &t).unwrap())
}

/// First-order part of `q^{e/4}` in `log q`, summed over the terms and read
/// at `q = 1`.
fn log_q_derivative(x: &QElement) -> Poly<usize> {
    let mut out = Poly::zero();
    for (k, c) in x.terms() {
        let factors = k.exps.iter().enumerate().filter(|(_, e)| **e != 0).map(|(i, e)| (i, *e)).collect();
        out = out.plus(&Poly::monomial(factors, BigRational::new(c * BigInt::from(k.q), BigInt::from(4))));
    }
    out
}

#[test]
fn exchange_law_for_generator_pairs() {
    let alg = algebra();
    for x in ["a", "b", "c"] {
        for y in ["a", "b", "c", "w"] {
            let ex = QElement::exp_half(&alg, x, 1).unwrap();
            let ey = QElement::exp_half(&alg, y, 1).unwrap();
            let e = alg.skew_entry(x, y).unwrap() as i32;
            // half-unit exponents: the exchange factor q^{ε/2} is q^{2ε/4}
            assert_eq!(ex.times(&ey), QElement::q_power(&alg, 2 * e).times(&ey.times(&ex)), "{x} {y}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn associativity(a in element(), b in element(), c in element()) {
        prop_assert_eq!(a.times(&b).times(&c), a.times(&b.times(&c)));
    }

    #[test]
    fn canonical_form_ignores_insertion_order(terms in raw_terms().prop_shuffle().prop_flat_map(|t| (Just(t.clone()), Just(t).prop_shuffle())), b in element()) {
        let (first, second) = terms;
        let alg = algebra();
        let x = QElement::from_terms(&alg, &first).unwrap();
        let y = QElement::from_terms(&alg, &second).unwrap();
        prop_assert_eq!(x.to_terms(), y.to_terms());
        prop_assert_eq!(x.times(&b).to_terms(), y.times(&b).to_terms());
    }

    #[test]
    fn involution_is_an_antimultiplicative_involution(a in element(), b in element()) {
        prop_assert_eq!(a.times(&b).involution(), b.involution().times(&a.involution()));
        prop_assert_eq!(a.involution().involution(), a);
    }

    #[test]
    fn first_order_bracket_is_the_commutator_slope(a in element(), b in element()) {
        let commutator = a.times(&b).minus(&b.times(&a));
        prop_assert!(commutator.classical().is_empty());
        prop_assert_eq!(a.first_order_bracket(&b).unwrap(), log_q_derivative(&commutator));
    }
}
