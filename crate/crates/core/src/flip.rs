//! Classical flips of inner edges and the induced change of shear
//! coordinates, in a field of rational functions.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::One;

use crate::poly::{rat, Poly};
use crate::ring::{Mat, Ring};
use crate::surface::{self, EdgeKind, FatGraph, HalfEdge, SurfaceError, VertexKind, Walk};

type SPoly = Poly<String>;

/// Quotient of two Laurent polynomials in named variables. Equality is
/// tested by cross-multiplication, so no normal form is maintained.
#[derive(Clone, Debug)]
pub struct RatFun {
    num: SPoly,
    den: SPoly,
}

impl RatFun {
    pub fn var(name: &str) -> RatFun {
        RatFun::from_poly(SPoly::var(name.to_string()))
    }

    pub fn from_poly(p: SPoly) -> RatFun {
        RatFun { num: p, den: SPoly::one() }
    }

    pub fn constant(c: BigRational) -> RatFun {
        RatFun::from_poly(SPoly::constant(c))
    }

    pub fn ratio(num: SPoly, den: SPoly) -> RatFun {
        assert!(!den.is_empty(), "zero denominator");
        RatFun { num, den }
    }

    pub fn numerator(&self) -> &SPoly {
        &self.num
    }

    pub fn denominator(&self) -> &SPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn inverse(&self) -> Option<RatFun> {
        (!self.num.is_empty()).then(|| RatFun { num: self.den.clone(), den: self.num.clone() })
    }

    pub fn powi(&self, e: i32) -> RatFun {
        let base = if e < 0 { self.inverse().expect("negative power of zero") } else { self.clone() };
        RatFun { num: base.num.pow(e.unsigned_abs()), den: base.den.pow(e.unsigned_abs()) }
    }

    /// Replace every variable by a rational function; unlisted variables are
    /// kept.
    pub fn substitute(&self, values: &Coordinates) -> RatFun {
        let sub = |p: &SPoly| {
            let mut acc = RatFun::from_poly(SPoly::zero());
            for (m, c) in p.terms() {
                let mut t = RatFun::constant(c.clone());
                for (v, e) in m {
                    let x = values.get(v).cloned().unwrap_or_else(|| RatFun::var(v));
                    t = t.times(&x.powi(*e));
                }
                acc = acc.plus(&t);
            }
            acc
        };
        let n = sub(&self.num);
        let d = sub(&self.den);
        n.times(&d.inverse().expect("substitution annihilates a denominator"))
    }
}

impl PartialEq for RatFun {
    fn eq(&self, other: &RatFun) -> bool {
        self.num.times(&other.den) == other.num.times(&self.den)
    }
}

impl Ring for RatFun {
    fn zero_like(&self) -> Self {
        RatFun::from_poly(SPoly::zero())
    }
    fn one_like(&self) -> Self {
        RatFun::from_poly(SPoly::one())
    }
    fn vanishes(&self) -> bool {
        self.num.is_empty()
    }
    fn plus(&self, other: &Self) -> Self {
        if self.num.is_empty() {
            return other.clone();
        }
        if other.num.is_empty() {
            return self.clone();
        }
        if self.den == other.den {
            return RatFun { num: self.num.plus(&other.num), den: self.den.clone() };
        }
        RatFun {
            num: self.num.times(&other.den).plus(&other.num.times(&self.den)),
            den: self.den.times(&other.den),
        }
    }
    fn times(&self, other: &Self) -> Self {
        RatFun { num: self.num.times(&other.num), den: self.den.times(&other.den) }
    }
    fn negate(&self) -> Self {
        RatFun { num: self.num.negate(), den: self.den.clone() }
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == SPoly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// Values of the exponentiated half-coordinates `e^{x/2}` by edge label;
/// labels not listed stand for themselves.
pub type Coordinates = BTreeMap<String, RatFun>;

/// `z = (w² − 1)/(2w)` and `s = (w² + 1)/(2w)`, so that `s² = 1 + z²` and the
/// square roots in the flip stay rational.
pub fn rational_parametrization(param: &str) -> (RatFun, RatFun) {
    let w = SPoly::var(param.to_string());
    let two_w = w.scale(&rat(2));
    let w2 = w.pow(2);
    let z = RatFun::ratio(w2.minus(&SPoly::one()), two_w.clone());
    let s = RatFun::ratio(w2.plus(&SPoly::one()), two_w);
    (z, s)
}

/// Classical monodromy with the coordinates substituted.
pub fn monodromy_at(g: &FatGraph, w: &Walk, values: &Coordinates) -> Mat<RatFun> {
    let alg = g.algebra().clone();
    surface::classical_monodromy(g, w).map(|p| {
        let named = p.map_vars(|i| alg.name(*i).to_string());
        RatFun::from_poly(named).substitute(values)
    })
}

/// Result of a flip: the new graph and the coordinates of its edges.
#[derive(Clone, Debug)]
pub struct Flip {
    pub graph: FatGraph,
    pub coordinates: Coordinates,
}

fn value(values: &Coordinates, label: &str) -> RatFun {
    values.get(label).cloned().unwrap_or_else(|| RatFun::var(label))
}

fn rotated_to(hs: &[HalfEdge], h: HalfEdge) -> [HalfEdge; 3] {
    let p = hs.iter().position(|x| *x == h).expect("listed");
    [hs[p], hs[(p + 1) % 3], hs[(p + 2) % 3]]
}

/// Flip the inner edge `edge` of `g` whose current coordinate value is taken
/// from `values`. `root` must satisfy `root² = 1 + z²` where `z` is the
/// value of the flipped edge; it supplies `(1 + e^Z)^{1/2}`.
///
/// With `v0 = (E, x1, x2)` and `v1 = (E, y1, y2)` counterclockwise, the new
/// vertices are `(E, x2, y1)` and `(E, y2, x1)`; `x2, y2` are multiplied by
/// `root`, `x1, y1` by `z / root`, and the flipped edge becomes `1 / z`.
pub fn classical_flip(g: &FatGraph, edge: &str, values: &Coordinates, root: &RatFun) -> Result<Flip, SurfaceError> {
    let unsupported = |why: &str| SurfaceError::UnsupportedFlip(format!("{edge}: {why}"));
    let ei = g.edge_by_id(edge)?;
    let e = &g.edges[ei];
    if e.kind != EdgeKind::Inner {
        return Err(unsupported("only inner edges can be flipped"));
    }
    let [v0, v1] = e.ends;
    if v0 == v1 {
        return Err(unsupported("edge has a single endpoint"));
    }
    for v in [v0, v1] {
        if g.vertices[v].kind != VertexKind::Internal {
            return Err(unsupported("endpoint is not a trivalent vertex"));
        }
        if g.cyclic[v].iter().any(|h| g.edges[h.edge].kind == EdgeKind::Loop) {
            return Err(unsupported("endpoint carries a hole loop"));
        }
    }
    let z = value(values, &e.label);
    let one = RatFun::from_poly(SPoly::one());
    if root.times(root) != one.plus(&z.times(&z)) {
        return Err(unsupported("root does not square to 1 + z^2"));
    }
    let [h0, x1, x2] = rotated_to(&g.cyclic[v0], HalfEdge { edge: ei, end: 0 });
    let [h1, y1, y2] = rotated_to(&g.cyclic[v1], HalfEdge { edge: ei, end: 1 });

    let mut edges = g.edges.clone();
    let mut cyclic = g.cyclic.clone();
    cyclic[v0] = vec![h0, x2, y1];
    cyclic[v1] = vec![h1, y2, x1];
    edges[y1.edge].ends[y1.end] = v0;
    edges[x1.edge].ends[x1.end] = v1;
    let graph = FatGraph::assemble(g.vertices.clone(), edges, cyclic)?;

    let mut coordinates: Coordinates = g
        .edges
        .iter()
        .filter(|x| x.kind != EdgeKind::Loop)
        .map(|x| (x.label.clone(), value(values, &x.label)))
        .collect();
    let down = z.times(&root.inverse().ok_or_else(|| unsupported("root vanishes"))?);
    for (h, factor) in [(x2, root), (y2, root), (x1, &down), (y1, &down)] {
        let label = &g.edges[h.edge].label;
        let v = coordinates[label].times(factor);
        coordinates.insert(label.clone(), v);
    }
    coordinates.insert(e.label.clone(), z.inverse().ok_or_else(|| unsupported("coordinate vanishes"))?);
    Ok(Flip { graph, coordinates })
}

/// `root / z`: the square root needed to flip the same edge back, where `z`
/// is the coordinate the edge had before the first flip.
pub fn root_after_flip(z: &RatFun, root: &RatFun) -> RatFun {
    root.times(&z.inverse().expect("nonzero coordinate"))
}

/// Constant one as a rational function.
pub fn one() -> RatFun {
    RatFun::constant(BigRational::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parametrization_squares() {
        let (z, s) = rational_parametrization("t");
        assert_eq!(s.times(&s), one().plus(&z.times(&z)));
    }

    #[test]
    fn substitution_and_equality() {
        let x = RatFun::var("x");
        let y = RatFun::var("y");
        let f = x.plus(&y).times(&y.inverse().unwrap());
        let mut vals = Coordinates::new();
        vals.insert("y".into(), x.clone());
        assert_eq!(f.substitute(&vals), RatFun::constant(rat(2)));
        assert_ne!(f, one());
    }
}
