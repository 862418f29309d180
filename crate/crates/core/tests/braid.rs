use monodromy::braid::{self, braid_act, ihx_classical, ihx_sides, ihx_verify, trace_multiset, verify_braid_invariance, verify_tuple, MonodromyTuple};
use monodromy::fixtures;
use monodromy::relations::RFamily;
use monodromy::ring::Mat;

fn r2() -> RFamily {
    RFamily::kulish_sklyanin(2).unwrap()
}

#[test]
fn invariance_on_two_and_three_holes() {
    let r = r2();
    for (id, arcs) in [("s031", vec!["a", "b"]), ("s041", vec!["a", "b", "c"])] {
        let t = MonodromyTuple::quantum(&fixtures::bundled(id), &arcs);
        assert!(verify_tuple(&t, &r).unwrap().is_none(), "{id}");
        for j in 2..=arcs.len() {
            let f = verify_braid_invariance(j, &t, &r).unwrap();
            assert!(f.is_none(), "{id} B_{j}: {}", f.unwrap());
        }
    }
}

#[test]
fn swapped_order_is_rejected() {
    let r = r2();
    let t = MonodromyTuple::quantum(&fixtures::bundled("s031"), &["b", "a"]);
    let f = verify_tuple(&t, &r).unwrap().expect("misordered tuple");
    assert_eq!((f.first, f.second, f.template), (1, 2, "r2143"));
    assert!(verify_braid_invariance(2, &t, &r).unwrap().is_some());
}

#[test]
fn classical_fixture_traces() {
    let fx = fixtures::bundled("s041");
    let t = MonodromyTuple::classical(&fx, &["a", "b", "c"]).unwrap();
    let before = trace_multiset(&t, 2);
    for j in [2, 3] {
        assert_eq!(trace_multiset(&braid_act(j, &t).unwrap(), 2), before);
    }
    let twice = braid::braid_word(&[2, 2], &t).unwrap();
    assert_eq!(trace_multiset(&twice, 2), before);
    assert_eq!(braid::braid_word(&[2, 3, 2], &t).unwrap(), braid::braid_word(&[3, 2, 3], &t).unwrap());
}

#[test]
fn three_term_identity() {
    let r = r2();
    let t = MonodromyTuple::quantum(&fixtures::bundled("s041"), &["a", "b", "c"]);
    let w = ihx_verify(&t, &r).unwrap();
    assert!(w.is_none(), "{}", w.unwrap());

    let id = Mat::identity(4, &monodromy::laurent::QPoly::one());
    let (lhs, rhs) = ihx_sides(&t, &r, &id).unwrap();
    assert!(lhs.first_mismatch(&rhs).is_some());

    let (lhs, rhs) = ihx_classical(&t, &r).unwrap();
    assert_eq!(lhs, rhs);
}

#[test]
fn three_term_needs_three() {
    let t = MonodromyTuple::quantum(&fixtures::bundled("s031"), &["a", "b"]);
    assert!(ihx_verify(&t, &r2()).is_err());
}
