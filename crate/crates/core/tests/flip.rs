use monodromy::fixtures::{self, Fixture};
use monodromy::flip::{classical_flip, monodromy_at, one, rational_parametrization, root_after_flip, Coordinates, Flip, RatFun};
use monodromy::surface::SurfaceError;

fn flip(fx: &Fixture, edge: &str) -> (Coordinates, RatFun, RatFun, Flip) {
    let g = &fx.graph;
    let (z, s) = rational_parametrization("t");
    let mut before = Coordinates::new();
    before.insert(g.edges[g.edge_by_id(edge).unwrap()].label.clone(), z.clone());
    let f = classical_flip(g, edge, &before, &s).unwrap();
    (before, z, s, f)
}

fn assert_same(fx: &Fixture, edge: &str, pairs: &[(&str, &[&str])]) {
    let (before, _, _, f) = flip(fx, edge);
    for (old, new) in pairs {
        let m_old = monodromy_at(&fx.graph, fx.arc(old), &before);
        let w = f.graph.walk_steps(new).unwrap();
        let m_new = monodromy_at(&f.graph, &w, &f.coordinates);
        assert_eq!(m_old, m_new, "{} flip {edge}: {old} vs {new:?}", fx.id);
    }
}

#[test]
fn monodromies_survive_flips_on_the_annulus() {
    let ann0 = fixtures::bundled("ann0");
    assert_same(
        &ann0,
        "E",
        &[
            ("viaE", &["p1", "p2"]),
            ("viaF", &["p1", "E", "F#0", "E", "p2"]),
            ("aroundE", &["p1", "E", "F#1", "E", "p1"]),
            ("aroundF", &["p1", "E", "F#0", "E", "p1"]),
        ],
    );
    assert_same(&ann0, "F", &[("viaF", &["p1", "p2"]), ("viaE", &["p1", "F", "E#0", "F", "p2"])]);
    let ann1 = fixtures::bundled("ann1");
    assert_same(
        &ann1,
        "E",
        &[("twist", &["p1", "F", "p2"]), ("viaF", &["p1", "E", "F", "E", "p2"]), ("viaE", &["p1", "E", "p2"])],
    );
}

#[test]
fn flipping_twice_restores_coordinates() {
    for id in ["ann0", "ann1"] {
        let fx = fixtures::bundled(id);
        for edge in ["E", "F"] {
            let (before, z, s, f) = flip(&fx, edge);
            let back = classical_flip(&f.graph, edge, &f.coordinates, &root_after_flip(&z, &s)).unwrap();
            for (label, v) in &back.coordinates {
                let expected = before.get(label).cloned().unwrap_or_else(|| RatFun::var(label));
                assert_eq!(*v, expected, "{id} {edge} {label}");
            }
        }
    }
}

#[test]
fn unsupported_edges() {
    let fx = fixtures::bundled("s031");
    let none = Coordinates::new();
    for edge in ["p", "w1", "A"] {
        let e = classical_flip(&fx.graph, edge, &none, &one());
        assert!(matches!(e, Err(SurfaceError::UnsupportedFlip(_))), "{edge}");
    }
    let ann0 = fixtures::bundled("ann0");
    let e = classical_flip(&ann0.graph, "E", &none, &one());
    assert!(matches!(e, Err(SurfaceError::UnsupportedFlip(_))), "root check");
}
