use monodromy::fixtures;
use monodromy::poly::Signature;
use monodromy::qtorus::QElement;
use monodromy::ring::Ring;
use monodromy::surface::{classical_monodromy, monodromy, PRINTED_COMMUTATOR_SIGN};

fn printed(id: &str, a: &str, b: &str) -> i64 {
    fixtures::bundled(id).graph.algebra().skew_entry(a, b).unwrap() * PRINTED_COMMUTATOR_SIGN
}

#[test]
fn commutators_of_the_small_graphs() {
    assert_eq!(printed("fig1", "pi", "Z1"), 1);
    assert_eq!(printed("fig1", "Z2", "pi"), 1);
    // the opposite orientation of the Z1, Z2 pair is forced by the other two
    assert_eq!(printed("fig1", "Z1", "Z2"), 1);
    assert_eq!(printed("fig2", "pi1", "Z1"), 1);
    assert_eq!(printed("fig2", "pi2", "Z1"), 1);
    assert_eq!(printed("fig2", "pi1", "pi2"), 0);
}

#[test]
fn quantum_monodromies_specialize_to_classical_ones() {
    for id in fixtures::bundled_ids() {
        let fx = fixtures::bundled(id);
        for (name, w) in fx.words.iter().chain(&fx.arcs) {
            let quantum = monodromy(&fx.graph, w).map(QElement::classical);
            assert_eq!(quantum, classical_monodromy(&fx.graph, w), "{id} {name}");
        }
    }
}

#[test]
fn classical_monodromies_are_unimodular_and_sign_definite() {
    for id in fixtures::bundled_ids() {
        let fx = fixtures::bundled(id);
        for (name, w) in fx.words.iter().chain(&fx.arcs) {
            let m = classical_monodromy(&fx.graph, w);
            assert_eq!(m.det(), m.get(0, 0).one_like(), "{id} {name}");
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    let e = m.get(i, j);
                    assert!(e.has_integer_coefficients(), "{id} {name}");
                    assert_ne!(e.signature(), Signature::Mixed, "{id} {name} ({i},{j})");
                }
            }
        }
    }
}
