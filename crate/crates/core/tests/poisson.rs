use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use monodromy::poisson::{self, BracketTable, Case, Entry, PPoly, PrintedTable, Rule};
use monodromy::poly::ratio;
use monodromy::ring::Ring;

const K: usize = 2;

fn two_closed_arcs() -> BracketTable {
    BracketTable::new(K, [((1, 1), Rule::derived("H")), ((2, 2), Rule::derived("H")), ((1, 2), Rule::derived("r2143"))]).unwrap()
}

fn generators(arcs: &[u32], k: usize) -> Vec<Entry> {
    arcs.iter().flat_map(|a| (1..=k).flat_map(move |i| (1..=k).map(move |j| Entry::new(*a, i, j)))).collect()
}

fn polynomial() -> impl Strategy<Value = PPoly> {
    let gens = generators(&[1, 2], K);
    let term = (-3i64..=3, prop::collection::vec((0..gens.len(), 0i32..=2), 0..3));
    prop::collection::vec(term, 1..4).prop_map(move |terms| {
        let mut p = PPoly::zero();
        for (c, factors) in terms {
            let m = factors.into_iter().map(|(g, e)| (gens[g], e)).collect();
            p = p.plus(&PPoly::monomial(m, ratio(c, 1)));
        }
        p
    })
}

/// Row reduction over the rationals, used as an independent rank oracle.
fn gauss_rank(mut m: Vec<Vec<BigRational>>) -> usize {
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = &m[r][c] / &m[rank][c];
                let pivot = m[rank].clone();
                for (x, y) in m[r].iter_mut().zip(pivot) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[test]
fn derived_rules_satisfy_jacobi() {
    let table = two_closed_arcs();
    assert!(poisson::jacobi_check(&table, &generators(&[1, 2], K), &BTreeSet::new()).unwrap().is_none());
    let crossing = BracketTable::new(K, [((1, 1), Rule::derived("H")), ((2, 2), Rule::derived("H")), ((1, 2), Rule::derived("r3142"))]).unwrap();
    assert!(poisson::jacobi_check(&crossing, &generators(&[1, 2], K), &BTreeSet::new()).unwrap().is_none());
}

#[test]
fn extra_interleaved_summand_breaks_jacobi() {
    let printed = Rule::Printed(PrintedTable::Interleaved { extra_term: true });
    let table = BracketTable::new(K, [((1, 1), Rule::derived("H")), ((2, 2), Rule::derived("H")), ((1, 2), printed)]).unwrap();
    assert!(poisson::jacobi_check(&table, &generators(&[1, 2], K), &BTreeSet::new()).unwrap().is_some());
}

#[test]
fn interleaved_rules_differ_by_a_product() {
    let derived = BracketTable::new(3, [((1, 2), Rule::derived("r3142"))]).unwrap();
    let printed = BracketTable::new(3, [((1, 2), Rule::Printed(PrintedTable::Interleaved { extra_term: false }))]).unwrap();
    for x in generators(&[1], 3) {
        for y in generators(&[2], 3) {
            let diff = derived.generator(&x, &y).unwrap().minus(&printed.generator(&x, &y).unwrap());
            assert_eq!(diff, PPoly::var(x).times(&PPoly::var(y)), "{x} {y}");
        }
    }
}

#[test]
fn self_rules_from_both_orderings_agree() {
    for k in 2..=4 {
        assert!(poisson::compare_rules(k, &Rule::derived("H1"), &Rule::derived("H"), 1).unwrap().is_none());
    }
}

#[test]
fn diagonal_point_bracket_is_twice_the_product() {
    for k in 2..=4 {
        let cfg = poisson::configuration(Case::SingleClosed, k, 0).unwrap();
        let lam = |i| cfg.point.value(&Entry::new(1, i, i));
        for i in 1..=k {
            for j in i + 1..=k {
                let v = cfg.point.eval(&cfg.table.generator(&Entry::new(1, i, j), &Entry::new(1, j, i)).unwrap()).unwrap();
                assert_eq!(v, ratio(2, 1) * lam(j) * (lam(j) - lam(i)), "k={k} ({i},{j})");
            }
        }
    }
}

#[test]
fn constrained_entries_form_a_closed_ideal() {
    for case in [Case::SingleClosedRestricted, Case::OpenRestricted, Case::S0s1Restricted] {
        for k in 2..=4 {
            let cfg = poisson::configuration(case, k, 2).unwrap();
            assert!(!cfg.constrained.is_empty());
            let w = poisson::reduction_closure_check(&cfg.table, &cfg.generators, &cfg.constrained).unwrap();
            assert!(w.is_none(), "{case} k={k}: {}", w.unwrap());
        }
    }
}

#[test]
fn leaf_dimensions() {
    for (case, k, s, rank) in [(Case::SingleClosed, 3, 0, 6), (Case::S013, 3, 0, 8), (Case::S0s1, 2, 3, 6), (Case::S022, 3, 0, 6)] {
        assert_eq!(poisson::configuration(case, k, s).unwrap().rank().unwrap(), rank, "{case} k={k} s={s}");
        assert_eq!(case.expected_rank(k, s), Some(rank));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bracket_is_antisymmetric(a in polynomial(), b in polynomial()) {
        let t = two_closed_arcs();
        prop_assert_eq!(t.bracket(&a, &b).unwrap(), t.bracket(&b, &a).unwrap().negate());
    }

    #[test]
    fn bracket_is_a_derivation(a in polynomial(), b in polynomial(), c in polynomial()) {
        let t = two_closed_arcs();
        let left = t.bracket(&a.times(&b), &c).unwrap();
        let right = a.times(&t.bracket(&b, &c).unwrap()).plus(&t.bracket(&a, &c).unwrap().times(&b));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn fraction_free_rank_matches_row_reduction(
        rows in prop::collection::vec(prop::collection::vec((-4i64..=4, 1i64..=3), 4), 1..6),
        dependent in any::<bool>(),
    ) {
        let mut m: Vec<Vec<BigRational>> = rows.iter().map(|r| r.iter().map(|(n, d)| ratio(*n, *d)).collect()).collect();
        if dependent && m.len() > 1 {
            let sum: Vec<BigRational> = m[0].iter().zip(&m[1]).map(|(x, y)| x - y * ratio(3, 2)).collect();
            m.push(sum);
        }
        prop_assert_eq!(poisson::rational_rank(&m), gauss_rank(m.clone()));
        let ints: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|(n, _)| BigInt::from(*n)).collect()).collect();
        let as_rat = ints.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
        prop_assert_eq!(poisson::integer_rank(ints), gauss_rank(as_rat));
    }

    #[test]
    fn rank_survives_rescaling(seed in any::<u64>()) {
        let cfg = poisson::configuration(Case::S013, 3, 0).unwrap();
        let point = cfg.point.rescaled(seed);
        prop_assert!(point.support().all(|(_, v)| !v.is_zero()));
        prop_assert_eq!(cfg.rank_at(&point).unwrap(), 8);
    }
}
