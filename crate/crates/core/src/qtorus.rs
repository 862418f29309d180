//! The quantum torus of exponentiated shear coordinates.
//!
//! Elements are integer combinations of `q^{a/4} W(n)`, where `W(n)` is the
//! Weyl-ordered exponential `e^{Σ n_x x / 2}` and central parameters enter
//! with integer powers. Products follow `W(n) W(m) = q^{nᵀεm/4} W(n+m)`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::laurent::QPoly;
use crate::poly::{Poly, Signature};
use crate::ring::Ring;

/// Sign relating the bracket tables to [`QElement::first_order_bracket`]:
/// the tables use `q = e^{-iπħ}`, the torus uses `q = e^{iπħ}`.
pub const TABLE_BRACKET_SIGN: i64 = -1;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TorusError {
    #[error("skew matrix is {rows}x{cols}, expected {n}x{n}")]
    SkewShape { rows: usize, cols: usize, n: usize },
    #[error("skew matrix is not antisymmetric at ({0}, {1})")]
    NotAntisymmetric(usize, usize),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("elements belong to different algebras")]
    Context,
}

/// Generators with constant commutators, plus central parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Algebra {
    pub generators: Vec<String>,
    pub centrals: Vec<String>,
    /// Antisymmetric form on the generators only; centrals pair to zero.
    pub skew: Vec<Vec<i64>>,
}

impl Algebra {
    pub fn new(generators: Vec<String>, centrals: Vec<String>, skew: Vec<Vec<i64>>) -> Result<Arc<Self>, TorusError> {
        let n = generators.len();
        if skew.len() != n || skew.iter().any(|r| r.len() != n) {
            return Err(TorusError::SkewShape { rows: skew.len(), cols: skew.first().map_or(0, |r| r.len()), n });
        }
        for (i, row) in skew.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if *v != -skew[j][i] {
                    return Err(TorusError::NotAntisymmetric(i, j));
                }
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for name in generators.iter().chain(&centrals) {
            if !seen.insert(name.clone()) {
                return Err(TorusError::DuplicateName(name.clone()));
            }
        }
        Ok(Arc::new(Algebra { generators, centrals, skew }))
    }

    /// Number of exponent slots (generators then centrals).
    pub fn width(&self) -> usize {
        self.generators.len() + self.centrals.len()
    }

    pub fn index(&self, name: &str) -> Result<usize, TorusError> {
        self.generators
            .iter()
            .chain(&self.centrals)
            .position(|g| g == name)
            .ok_or_else(|| TorusError::UnknownName(name.to_string()))
    }

    pub fn is_central(&self, idx: usize) -> bool {
        idx >= self.generators.len()
    }

    pub fn name(&self, idx: usize) -> &str {
        if idx < self.generators.len() {
            &self.generators[idx]
        } else {
            &self.centrals[idx - self.generators.len()]
        }
    }

    /// `nᵀ ε m` over the generator slots.
    pub fn pairing(&self, n: &[i32], m: &[i32]) -> i64 {
        let mut acc = 0i64;
        for (row, &na) in self.skew.iter().zip(n) {
            if na == 0 {
                continue;
            }
            let s: i64 = row.iter().zip(m).filter(|(_, mb)| **mb != 0).map(|(e, mb)| e * *mb as i64).sum();
            acc += na as i64 * s;
        }
        acc
    }

    pub fn skew_entry(&self, a: &str, b: &str) -> Result<i64, TorusError> {
        let (i, j) = (self.index(a)?, self.index(b)?);
        if self.is_central(i) || self.is_central(j) {
            return Ok(0);
        }
        Ok(self.skew[i][j])
    }
}

/// Exponent vector (half-units for generators, plain powers for centrals)
/// together with the power of `q^{1/4}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QKey {
    pub exps: Vec<i32>,
    pub q: i32,
}

/// Serialized term.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct QTerm {
    pub q: i32,
    pub exps: Vec<i32>,
    pub coeff: String,
}

#[derive(Clone, Debug)]
pub struct QElement {
    alg: Arc<Algebra>,
    terms: BTreeMap<QKey, BigInt>,
}

impl PartialEq for QElement {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.alg, &other.alg) || self.alg == other.alg) && self.terms == other.terms
    }
}

impl QElement {
    pub fn zero(alg: &Arc<Algebra>) -> Self {
        QElement { alg: alg.clone(), terms: BTreeMap::new() }
    }

    pub fn one(alg: &Arc<Algebra>) -> Self {
        QElement::scalar(alg, &QPoly::one())
    }

    pub fn constant(alg: &Arc<Algebra>, c: i64) -> Self {
        QElement::scalar(alg, &QPoly::constant(c))
    }

    /// A Laurent polynomial in `q^{1/4}` embedded as a scalar.
    pub fn scalar(alg: &Arc<Algebra>, p: &QPoly) -> Self {
        let mut out = QElement::zero(alg);
        let w = alg.width();
        for (e, c) in p.terms() {
            out.add_term(QKey { exps: vec![0; w], q: e }, c.clone());
        }
        out
    }

    /// `q^{quarters/4}`.
    pub fn q_power(alg: &Arc<Algebra>, quarters: i32) -> Self {
        QElement::scalar(alg, &QPoly::monomial(quarters, 1))
    }

    /// `q^{q/4} W(exps)` with coefficient `c`.
    pub fn term(alg: &Arc<Algebra>, exps: Vec<i32>, q: i32, c: impl Into<BigInt>) -> Self {
        assert_eq!(exps.len(), alg.width(), "exponent vector length");
        let mut out = QElement::zero(alg);
        out.add_term(QKey { exps, q }, c.into());
        out
    }

    /// `e^{halves · x / 2}` for a generator, or `ω^{halves}` for a central.
    pub fn exp_half(alg: &Arc<Algebra>, name: &str, halves: i32) -> Result<Self, TorusError> {
        let idx = alg.index(name)?;
        let mut exps = vec![0; alg.width()];
        exps[idx] = halves;
        Ok(QElement::term(alg, exps, 0, 1))
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.alg
    }

    fn add_term(&mut self, k: QKey, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(k) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&QKey, &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn same_context(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.alg, &other.alg) || self.alg == other.alg
    }

    pub fn product(&self, other: &Self) -> Result<Self, TorusError> {
        if !self.same_context(other) {
            return Err(TorusError::Context);
        }
        let mut out = QElement::zero(&self.alg);
        for (a, c) in &self.terms {
            for (b, d) in &other.terms {
                let shift = self.alg.pairing(&a.exps, &b.exps);
                let exps = a.exps.iter().zip(&b.exps).map(|(x, y)| x + y).collect();
                out.add_term(QKey { exps, q: a.q + b.q + shift as i32 }, c * d);
            }
        }
        Ok(out)
    }

    /// The antilinear anti-automorphism fixing every `W(n)` and sending
    /// `q^{1/4}` to `q^{-1/4}`.
    pub fn involution(&self) -> Self {
        let mut out = QElement::zero(&self.alg);
        for (k, c) in &self.terms {
            out.add_term(QKey { exps: k.exps.clone(), q: -k.q }, c.clone());
        }
        out
    }

    pub fn is_hermitian(&self) -> bool {
        self.involution() == *self
    }

    /// Set `q = 1`. Variables are slot indices; generator exponents stay in
    /// half-units.
    pub fn classical(&self) -> Poly<usize> {
        let mut out = Poly::zero();
        for (k, c) in &self.terms {
            let factors = k.exps.iter().enumerate().filter(|(_, e)| **e != 0).map(|(i, e)| (i, *e)).collect();
            out = out.plus(&Poly::monomial(factors, BigRational::from_integer(c.clone())));
        }
        out
    }

    /// Leading-order commutator: `{W(n), W(m)} = (nᵀεm / 2) W(n+m)` on the
    /// classical images.
    pub fn first_order_bracket(&self, other: &Self) -> Result<Poly<usize>, TorusError> {
        if !self.same_context(other) {
            return Err(TorusError::Context);
        }
        let mut out = Poly::zero();
        for (a, c) in &self.terms {
            for (b, d) in &other.terms {
                let s = self.alg.pairing(&a.exps, &b.exps);
                if s == 0 {
                    continue;
                }
                let coeff = BigRational::new(c * d * BigInt::from(s), BigInt::from(2));
                let factors = a
                    .exps
                    .iter()
                    .zip(&b.exps)
                    .enumerate()
                    .filter(|(_, (x, y))| *x + *y != 0)
                    .map(|(i, (x, y))| (i, x + y))
                    .collect();
                out = out.plus(&Poly::monomial(factors, coeff));
            }
        }
        Ok(out)
    }

    pub fn signature(&self) -> Signature {
        if self.terms.is_empty() {
            return Signature::Zero;
        }
        let pos = self.terms.values().all(|c| c.is_positive());
        let neg = self.terms.values().all(|c| c.is_negative());
        match (pos, neg) {
            (true, _) => Signature::AllPositive,
            (_, true) => Signature::AllNegative,
            _ => Signature::Mixed,
        }
    }

    /// Distinct `q`-exponents carried by the terms.
    pub fn q_offsets(&self) -> Vec<i32> {
        let mut v: Vec<i32> = self.terms.keys().map(|k| k.q).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn to_terms(&self) -> Vec<QTerm> {
        self.terms
            .iter()
            .map(|(k, c)| QTerm { q: k.q, exps: k.exps.clone(), coeff: c.to_string() })
            .collect()
    }

    pub fn from_terms(alg: &Arc<Algebra>, terms: &[QTerm]) -> Result<Self, TorusError> {
        let mut out = QElement::zero(alg);
        for t in terms {
            if t.exps.len() != alg.width() {
                return Err(TorusError::SkewShape { rows: t.exps.len(), cols: 0, n: alg.width() });
            }
            let c: BigInt = t.coeff.parse().map_err(|_| TorusError::UnknownName(t.coeff.clone()))?;
            out.add_term(QKey { exps: t.exps.clone(), q: t.q }, c);
        }
        Ok(out)
    }
}

/// Human-readable exponent such as `(pi1+Z1-Z2)/2`.
pub fn render_exponent(alg: &Algebra, exps: &[i32]) -> String {
    let mut body = String::new();
    let mut centrals = Vec::new();
    for (i, e) in exps.iter().enumerate() {
        if *e == 0 {
            continue;
        }
        if alg.is_central(i) {
            centrals.push(if *e == 1 { alg.name(i).to_string() } else { format!("{}^{}", alg.name(i), e) });
            continue;
        }
        let sign = if *e < 0 { "-" } else if body.is_empty() { "" } else { "+" };
        let mag = e.abs();
        if mag == 1 {
            body.push_str(&format!("{sign}{}", alg.name(i)));
        } else {
            body.push_str(&format!("{sign}{mag}{}", alg.name(i)));
        }
    }
    let mut parts = Vec::new();
    if !body.is_empty() {
        parts.push(format!("e^({body})/2"));
    }
    parts.extend(centrals);
    parts.join("*")
}

impl fmt::Display for QElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (k, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if n > 0 {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            let mut parts = Vec::new();
            let mag = c.abs();
            if !mag.is_one() {
                parts.push(mag.to_string());
            }
            if k.q != 0 {
                parts.push(format!("q^({}/4)", k.q));
            }
            let w = render_exponent(&self.alg, &k.exps);
            if !w.is_empty() {
                parts.push(w);
            }
            if parts.is_empty() {
                parts.push("1".into());
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl Ring for QElement {
    fn zero_like(&self) -> Self {
        QElement::zero(&self.alg)
    }
    fn one_like(&self) -> Self {
        QElement::one(&self.alg)
    }
    fn vanishes(&self) -> bool {
        self.terms.is_empty()
    }
    fn plus(&self, other: &Self) -> Self {
        assert!(self.same_context(other), "elements belong to different algebras");
        let (mut big, small) = if self.terms.len() >= other.terms.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (k, c) in &small.terms {
            big.add_term(k.clone(), c.clone());
        }
        big
    }
    fn times(&self, other: &Self) -> Self {
        self.product(other).expect("elements belong to different algebras")
    }
    fn negate(&self) -> Self {
        QElement { alg: self.alg.clone(), terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg() -> Arc<Algebra> {
        // e(Z1, pi) = -1
        Algebra::new(vec!["Z1".into(), "pi".into()], vec!["w".into()], vec![vec![0, -1], vec![1, 0]]).unwrap()
    }

    #[test]
    fn exchange_of_half_exponentials() {
        let a = alg();
        let z = QElement::exp_half(&a, "Z1", 1).unwrap();
        let p = QElement::exp_half(&a, "pi", 1).unwrap();
        let zp = z.times(&p);
        assert_eq!(zp, QElement::term(&a, vec![1, 1, 0], -1, 1));
        // e^{Z/2} e^{pi/2} = q^{-1/2} e^{pi/2} e^{Z/2}
        assert_eq!(zp, QElement::q_power(&a, -2).times(&p.times(&z)));
    }

    #[test]
    fn inverse_pair_and_squares() {
        let a = alg();
        let z = QElement::exp_half(&a, "Z1", 1).unwrap();
        let zi = QElement::exp_half(&a, "Z1", -1).unwrap();
        assert_eq!(z.times(&zi), QElement::one(&a));
        assert_eq!(z.times(&z), QElement::exp_half(&a, "Z1", 2).unwrap());
    }

    #[test]
    fn involution_reverses_products() {
        let a = alg();
        let z = QElement::exp_half(&a, "Z1", 1).unwrap();
        let p = QElement::exp_half(&a, "pi", 1).unwrap();
        let lhs = z.times(&p).involution();
        assert_eq!(lhs, p.times(&z));
        assert_eq!(lhs, QElement::q_power(&a, 2).times(&z.times(&p)));
    }

    #[test]
    fn first_order_example() {
        let a = alg();
        let z = QElement::exp_half(&a, "Z1", 1).unwrap();
        let p = QElement::exp_half(&a, "pi", 1).unwrap();
        let b = z.first_order_bracket(&p).unwrap();
        let expect = Poly::monomial(vec![(0, 1), (1, 1)], BigRational::new((-1).into(), 2.into()));
        assert_eq!(b, expect);
    }

    #[test]
    fn context_mismatch() {
        let a = alg();
        let b = Algebra::new(vec!["x".into()], vec![], vec![vec![0]]).unwrap();
        let x = QElement::one(&a);
        let y = QElement::one(&b);
        assert_eq!(x.product(&y), Err(TorusError::Context));
    }

    #[test]
    fn rejects_bad_skew() {
        assert!(Algebra::new(vec!["a".into(), "b".into()], vec![], vec![vec![0, 1], vec![1, 0]]).is_err());
        assert!(Algebra::new(vec!["a".into(), "a".into()], vec![], vec![vec![0, 0], vec![0, 0]]).is_err());
    }
}
