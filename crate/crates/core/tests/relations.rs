use std::collections::BTreeSet;

use monodromy::fixtures::{self, Fixture};
use monodromy::relations::{self, check_arcs, template, verify, verify_powered, Invertible, RFamily};
use monodromy::surface::{monodromy, monodromy_inverse, Walk};

// fixture, first arc, second arc (empty for a self pair), expected template
const PAIRS: &[(&str, &str, &str, &str)] = &[
    ("fig1", "Mi", "Mj", "basic1"),
    ("fig1", "Mj", "Mi", "basic1dual"),
    ("fig1", "x", "x", "H"),
    ("fig1", "loop1", "loop1", "H"),
    ("fig1", "x", "y", "r3142"),
    ("fig1", "loop1", "x", "r3142"),
    ("fig1", "loop1", "loop2", "r2143"),
    ("fig2", "M", "M", "basic2"),
    ("fig2", "M", "boundary", "basic1"),
    ("fig2", "boundary", "M", "basic1dual"),
    ("fig2", "open", "corner", "basic1"),
    ("fig2", "corner", "open", "basic1dual"),
    ("tri", "right", "left", "basic1"),
    ("tri", "left", "right", "basic1dual"),
    ("tri", "far", "far", "basic2"),
    ("s031", "a", "b", "r2143"),
    ("s031", "ba", "a", "r3241"),
    ("s031", "ba", "ba", "H"),
    ("s041", "a", "c", "r2143"),
    ("s041", "b", "c", "r2143"),
    ("ann0", "viaF", "viaE", "relcomp2"),
    ("ann0", "viaE", "viaF", "relcomp3"),
    ("ann0", "aroundF", "aroundF", "H"),
    ("ann0", "aroundE", "viaF", "r21-3x"),
    ("ann1", "viaE", "viaF", "relcomp1"),
    ("ann1", "viaF", "viaE", "relcomp4"),
    ("ann1", "viaE", "twist", "relcomp4"),
    ("s032", "direct", "back", "eye"),
    ("s032", "loop1", "direct", "r21-3x"),
    ("s032", "direct", "around", "relcomp2"),
    ("eye", "direct", "reverse", "eye"),
    ("eye", "loop", "direct", "r21-3x"),
    ("eye", "around", "around", "basic2"),
];

fn arcs<'a>(fx: &'a Fixture, a: &str, b: &str) -> (&'a Walk, Option<&'a Walk>) {
    (fx.arc(a), (!b.is_empty() && b != a).then(|| fx.arc(b)))
}

#[test]
fn curated_pairs_classify_and_verify() {
    let r = RFamily::kulish_sklyanin(2).unwrap();
    let mut seen = BTreeSet::new();
    for &(id, a, b, expected) in PAIRS {
        let fx = fixtures::bundled(id);
        let (x, y) = arcs(&fx, a, b);
        let c = check_arcs(&fx.graph, x, y, &r).unwrap();
        assert_eq!(c.template, expected, "{id} {a} {b}");
        assert!(c.witness.is_none(), "{id} {a} {b}: {}", c.witness.unwrap());
        seen.insert(expected);
    }
    for t in relations::catalog() {
        if t.id != "H1" {
            assert!(seen.contains(t.id), "template {} not exercised", t.id);
        }
    }
}

#[test]
fn h_and_h1_hold_on_the_same_instances() {
    let r = RFamily::kulish_sklyanin(2).unwrap();
    let (h, h1) = (template("H").unwrap(), template("H1").unwrap());
    for (id, a) in [("fig1", "x"), ("fig1", "loop1"), ("s031", "ba"), ("s041", "b"), ("eye", "loop")] {
        let fx = fixtures::bundled(id);
        let m = monodromy(&fx.graph, fx.arc(a));
        assert!(verify(&h, &m, &m, &r).unwrap().is_none(), "H on {id} {a}");
        assert!(verify(&h1, &m, &m, &r).unwrap().is_none(), "H1 on {id} {a}");
    }
}

#[test]
fn wrong_template_gives_a_witness() {
    let r = RFamily::kulish_sklyanin(2).unwrap();
    let fx = fixtures::bundled("s031");
    let (a, b) = (monodromy(&fx.graph, fx.arc("a")), monodromy(&fx.graph, fx.arc("b")));
    let w = verify(&template("r3241").unwrap(), &a, &b, &r).unwrap();
    assert!(w.is_some());
    assert!(verify(&template("r2143").unwrap(), &b, &a, &r).unwrap().is_some());
}

#[test]
fn crossing_arcs_satisfy_no_template() {
    let r = RFamily::kulish_sklyanin(2).unwrap();
    let fx = fixtures::bundled("ann1");
    let (a, b) = (monodromy(&fx.graph, fx.arc("twist")), monodromy(&fx.graph, fx.arc("viaF")));
    for t in relations::catalog().iter().filter(|t| !t.same_arc) {
        assert!(verify(t, &a, &b, &r).unwrap().is_some(), "{}", t.id);
        assert!(verify(t, &b, &a, &r).unwrap().is_some(), "{}", t.id);
    }
}

fn invertible(fx: &Fixture, a: &str) -> Invertible {
    let w = fx.arc(a);
    Invertible { matrix: monodromy(&fx.graph, w), inverse: Some(monodromy_inverse(&fx.graph, w)) }
}

#[test]
fn powered_variants() {
    let r = RFamily::kulish_sklyanin(2).unwrap();
    let exps = [-2, -1, 1, 2];
    let s031 = fixtures::bundled("s031");
    let (a, b, ba) = (invertible(&s031, "a"), invertible(&s031, "b"), invertible(&s031, "ba"));
    let nested = template("r2143").unwrap();
    for p in exps {
        for m in exps {
            assert!(verify_powered(&nested, &a, p, &b, m, &r).unwrap().is_none(), "r2143 ({p}, {m})");
        }
    }
    let outer = template("r3241").unwrap();
    let h = template("H").unwrap();
    let h1 = template("H1").unwrap();
    for p in exps {
        assert!(verify_powered(&outer, &ba, 1, &a, p, &r).unwrap().is_none(), "r3241 m = {p}");
        assert!(verify_powered(&h, &ba, p, &ba, 1, &r).unwrap().is_none(), "H p = {p}");
        assert!(verify_powered(&h1, &ba, 1, &ba, p, &r).unwrap().is_none(), "H1 m = {p}");
    }
    let eye = fixtures::bundled("eye");
    let (lp, direct) = (invertible(&eye, "loop"), invertible(&eye, "direct"));
    let mixed = template("r21-3x").unwrap();
    for p in exps {
        assert!(verify_powered(&mixed, &lp, p, &direct, 1, &r).unwrap().is_none(), "r21-3x p = {p}");
    }
    assert!(verify_powered(&mixed, &lp, 1, &direct, 2, &r).is_err());
}

#[test]
fn inverses_are_two_sided() {
    for id in fixtures::bundled_ids() {
        let fx = fixtures::bundled(id);
        for name in fx.arcs.keys() {
            let inv = invertible(&fx, name);
            let one = inv.matrix.mul(inv.inverse.as_ref().unwrap());
            let other = inv.inverse.as_ref().unwrap().mul(&inv.matrix);
            let id2 = monodromy::ring::Mat::identity(2, inv.matrix.get(0, 0));
            assert_eq!(one, id2, "{id} {name}");
            assert_eq!(other, id2, "{id} {name}");
        }
    }
}
