//! Braid-group action on tuples of closed monodromies at one cusp, and the
//! three-term identity for a pair of crossing products.

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::fixtures::Fixture;
use crate::laurent::QPoly;
use crate::poly::Poly;
use crate::qtorus::QElement;
use crate::relations::{self, RFamily, RelationError, Template, Witness};
use crate::ring::{Mat, Ring};
use crate::rmatrix;
use crate::surface::{self, lift_scalar};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum BraidError {
    #[error("generator B_{j} needs 2 <= j <= {len}")]
    Generator { j: usize, len: usize },
    #[error("matrix {0} has no available inverse")]
    NoInverse(usize),
    #[error("expected {expected} matrices, found {found}")]
    Arity { expected: usize, found: usize },
    #[error(transparent)]
    Relation(#[from] RelationError),
}

/// A matrix together with its two-sided inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct Member<T> {
    pub matrix: Mat<T>,
    pub inverse: Mat<T>,
}

impl<T: Ring> Member<T> {
    /// Inverse by adjugate, valid when the determinant is exactly one.
    pub fn unimodular(matrix: Mat<T>) -> Option<Member<T>> {
        if matrix.rows() != 2 || !matrix.is_square() {
            return None;
        }
        let one = matrix.get(0, 0).one_like();
        if matrix.det() != one {
            return None;
        }
        let inverse = Mat::from_rows(vec![
            vec![matrix.get(1, 1).clone(), matrix.get(0, 1).negate()],
            vec![matrix.get(1, 0).negate(), matrix.get(0, 0).clone()],
        ]);
        Some(Member { matrix, inverse })
    }
}

/// Ordered monodromies `M_(1), ..., M_(s)` of closed arcs at a single cusp,
/// listed by the linear order of their ends.
#[derive(Clone, Debug, PartialEq)]
pub struct MonodromyTuple<T> {
    pub members: Vec<Member<T>>,
}

impl<T: Ring> MonodromyTuple<T> {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn matrices(&self) -> Vec<&Mat<T>> {
        self.members.iter().map(|m| &m.matrix).collect()
    }
}

impl MonodromyTuple<QElement> {
    /// Quantum tuple of the named arcs, with inverses from inverted tokens.
    pub fn quantum(fx: &Fixture, arcs: &[&str]) -> MonodromyTuple<QElement> {
        let members = arcs
            .iter()
            .map(|a| {
                let w = fx.arc(a);
                Member { matrix: surface::monodromy(&fx.graph, w), inverse: surface::monodromy_inverse(&fx.graph, w) }
            })
            .collect();
        MonodromyTuple { members }
    }
}

impl MonodromyTuple<Poly<usize>> {
    pub fn classical(fx: &Fixture, arcs: &[&str]) -> Result<MonodromyTuple<Poly<usize>>, BraidError> {
        let members = arcs
            .iter()
            .enumerate()
            .map(|(n, a)| Member::unimodular(surface::classical_monodromy(&fx.graph, fx.arc(a))).ok_or(BraidError::NoInverse(n + 1)))
            .collect::<Result<_, _>>()?;
        Ok(MonodromyTuple { members })
    }

    /// `s` generic unimodular matrices `[[a, b], [c, (1 + bc)/a]]` in fresh
    /// Laurent variables.
    pub fn generic(s: usize) -> MonodromyTuple<Poly<usize>> {
        let members = (0..s)
            .map(|n| {
                let (a, b, c) = (Poly::var(3 * n), Poly::var(3 * n + 1), Poly::var(3 * n + 2));
                let a_inv = Poly::monomial(vec![(3 * n, -1)], BigRational::one());
                let d = a_inv.times(&Poly::one().plus(&b.times(&c)));
                Member::unimodular(Mat::from_rows(vec![vec![a, b], vec![c, d]])).expect("unimodular by construction")
            })
            .collect();
        MonodromyTuple { members }
    }
}

/// `B_j`, one-based: `M_(j-1) -> M_(j-1) M_(j) M_(j-1)^{-1}`, `M_(j) -> M_(j-1)`.
pub fn braid_act<T: Ring>(j: usize, t: &MonodromyTuple<T>) -> Result<MonodromyTuple<T>, BraidError> {
    if j < 2 || j > t.len() {
        return Err(BraidError::Generator { j, len: t.len() });
    }
    let (prev, cur) = (&t.members[j - 2], &t.members[j - 1]);
    let conjugated = Member {
        matrix: prev.matrix.mul(&cur.matrix).mul(&prev.inverse),
        inverse: prev.matrix.mul(&cur.inverse).mul(&prev.inverse),
    };
    let mut out = t.clone();
    out.members[j - 2] = conjugated;
    out.members[j - 1] = prev.clone();
    Ok(out)
}

/// Applies generators left to right.
pub fn braid_word<T: Ring>(word: &[usize], t: &MonodromyTuple<T>) -> Result<MonodromyTuple<T>, BraidError> {
    word.iter().try_fold(t.clone(), |acc, j| braid_act(*j, &acc))
}

/// Sorted traces of `M_(r)^p` for every member and `1 <= p <= max_power`.
pub fn trace_multiset(t: &MonodromyTuple<Poly<usize>>, max_power: u32) -> Vec<String> {
    let mut out: Vec<String> = t
        .members
        .iter()
        .flat_map(|m| (1..=max_power).map(move |p| format!("{p}:{}", m.matrix.pow(p).trace())))
        .collect();
    out.sort();
    out
}

/// First pair of a tuple that violates its expected relation.
#[derive(Clone, Debug, Serialize)]
pub struct PairFailure {
    pub first: usize,
    pub second: usize,
    pub template: &'static str,
    pub witness: Witness,
}

impl std::fmt::Display for PairFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "M({}), M({}) under {}: {}", self.first, self.second, self.template, self.witness)
    }
}

/// Checks `H` for every member and the nested relation for every ordered
/// pair `r < r'`, with `M_(r)` in the first slot. Indices are one-based.
pub fn verify_tuple(t: &MonodromyTuple<QElement>, r: &RFamily) -> Result<Option<PairFailure>, BraidError> {
    let own = relations::template("H")?;
    let nested = relations::template("r2143")?;
    let check = |x: usize, y: usize, tpl: &Template| -> Result<Option<PairFailure>, BraidError> {
        let w = relations::verify(tpl, &t.members[x].matrix, &t.members[y].matrix, r)?;
        Ok(w.map(|witness| PairFailure { first: x + 1, second: y + 1, template: tpl.id, witness }))
    };
    for x in 0..t.len() {
        if let Some(f) = check(x, x, &own)? {
            return Ok(Some(f));
        }
        for y in x + 1..t.len() {
            if let Some(f) = check(x, y, &nested)? {
                return Ok(Some(f));
            }
        }
    }
    Ok(None)
}

/// Applies `B_j` and re-verifies the relations of the transformed tuple.
pub fn verify_braid_invariance(j: usize, t: &MonodromyTuple<QElement>, r: &RFamily) -> Result<Option<PairFailure>, BraidError> {
    verify_tuple(&braid_act(j, t)?, r)
}

/// Both sides of the three-term identity for `(M_(1) M_(2))` in slot 1 and
/// `(M_(2) M_(3))` in slot 2:
///
/// `(M1M2)_1 R^{-T} (M2M3)_2 = q R (M2M3)_2 R^{-1} (M1M2)_1 R
///   − (q^{3/2} − q^{-1/2}) R (M2)_2 R^{-1} (M1M2M3)_1 P`.
///
/// `exchange` stands in for the permutation `P` in the last term.
pub fn ihx_sides(
    t: &MonodromyTuple<QElement>,
    r: &RFamily,
    exchange: &Mat<QPoly>,
) -> Result<(Mat<QElement>, Mat<QElement>), BraidError> {
    if t.len() != 3 {
        return Err(BraidError::Arity { expected: 3, found: t.len() });
    }
    let k = r.k;
    for m in t.matrices() {
        if m.rows() != k {
            return Err(RelationError::Dimension { expected: k, found: m.rows() }.into());
        }
    }
    let [m1, m2, m3] = [0, 1, 2].map(|i| &t.members[i].matrix);
    let alg = m1.get(0, 0).algebra().clone();
    let lift = |m: &Mat<QPoly>| lift_scalar(&alg, m);
    let scalar = |p: QPoly| QElement::scalar(&alg, &p);
    let (r12, r_inv, r_inv_t, p12) = (lift(&r.r), lift(&r.r_inv), lift(&r.r_inv_t), lift(exchange));
    let m12 = m1.mul(m2);
    let m23 = m2.mul(m3);
    let m123 = m12.mul(m3);

    let lhs = m12.kron_left(k).mul(&r_inv_t).mul(&m23.kron_right(k));
    let first = r12.mul(&m23.kron_right(k)).mul(&r_inv).mul(&m12.kron_left(k)).mul(&r12).scale(&scalar(QPoly::half(2, 1)));
    let coefficient = QPoly::half(3, 1).minus(&QPoly::half(-1, 1));
    let second = r12.mul(&m2.kron_right(k)).mul(&r_inv).mul(&m123.kron_left(k)).mul(&p12).scale(&scalar(coefficient));
    Ok((lhs, first.sub(&second)))
}

/// First mismatch of the three-term identity, rendered.
pub fn ihx_verify(t: &MonodromyTuple<QElement>, r: &RFamily) -> Result<Option<Witness>, BraidError> {
    let (lhs, rhs) = ihx_sides(t, r, &rmatrix::permutation(r.k))?;
    Ok(lhs.first_mismatch(&rhs).map(|w| Witness { row: w.row, col: w.col, difference: w.left.minus(&w.right).to_string() }))
}

pub type ClassicalSides = (Mat<Poly<usize>>, Mat<Poly<usize>>);

/// Both sides of the identity at `q = 1`.
pub fn ihx_classical(t: &MonodromyTuple<QElement>, r: &RFamily) -> Result<ClassicalSides, BraidError> {
    let (lhs, rhs) = ihx_sides(t, r, &rmatrix::permutation(r.k))?;
    Ok((lhs.map(QElement::classical), rhs.map(QElement::classical)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_range() {
        let t = MonodromyTuple::generic(2);
        assert_eq!(braid_act(1, &t), Err(BraidError::Generator { j: 1, len: 2 }));
        assert_eq!(braid_act(3, &t), Err(BraidError::Generator { j: 3, len: 2 }));
        assert!(braid_act(2, &t).is_ok());
    }

    #[test]
    fn inverses_follow_the_action() {
        let t = braid_word(&[2, 3, 2, 2], &MonodromyTuple::generic(3)).unwrap();
        for m in &t.members {
            let id = Mat::identity(2, m.matrix.get(0, 0));
            assert_eq!(m.matrix.mul(&m.inverse), id);
        }
    }

    #[test]
    fn braid_relations_on_generic_tuples() {
        let t = MonodromyTuple::generic(4);
        assert_eq!(braid_word(&[2, 3, 2], &t).unwrap(), braid_word(&[3, 2, 3], &t).unwrap());
        assert_eq!(braid_word(&[3, 4, 3], &t).unwrap(), braid_word(&[4, 3, 4], &t).unwrap());
        assert_eq!(braid_word(&[2, 4], &t).unwrap(), braid_word(&[4, 2], &t).unwrap());
        assert_ne!(braid_word(&[2, 3], &t).unwrap(), braid_word(&[3, 2], &t).unwrap());
    }

    #[test]
    fn traces_are_permuted() {
        let t = MonodromyTuple::generic(3);
        let before = trace_multiset(&t, 2);
        for word in [vec![2], vec![3], vec![2, 3, 3, 2]] {
            assert_eq!(trace_multiset(&braid_word(&word, &t).unwrap(), 2), before);
        }
    }
}
