//! Commutative multivariate Laurent polynomials with rational coefficients.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::ring::Ring;

/// Sorted list of (variable, nonzero exponent).
pub type Monomial<V> = Vec<(V, i32)>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly<V: Ord> {
    terms: BTreeMap<Monomial<V>, BigRational>,
}

/// Sign pattern of the coefficients of a polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Signature {
    Zero,
    AllPositive,
    AllNegative,
    Mixed,
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn mono_mul<V: Ord + Clone>(a: &Monomial<V>, b: &Monomial<V>) -> Monomial<V> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let e = a[i].1 + b[j].1;
                if e != 0 {
                    out.push((a[i].0.clone(), e));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl<V: Ord + Clone> Default for Poly<V> {
    fn default() -> Self {
        Poly { terms: BTreeMap::new() }
    }
}

impl<V: Ord + Clone + fmt::Debug> Poly<V> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn var(v: V) -> Self {
        Self::monomial(vec![(v, 1)], BigRational::one())
    }

    /// Monomial from unsorted factors; repeated variables are merged.
    pub fn monomial(factors: Vec<(V, i32)>, c: BigRational) -> Self {
        let mut m: BTreeMap<V, i32> = BTreeMap::new();
        for (v, e) in factors {
            *m.entry(v).or_insert(0) += e;
        }
        let mono = m.into_iter().filter(|(_, e)| *e != 0).collect();
        let mut p = Self::zero();
        p.add_term(mono, c);
        p
    }

    pub fn add_term(&mut self, m: Monomial<V>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
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

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial<V>, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial<V>, c: &BigRational) -> Self {
        let mut out = Self::zero();
        for (n, d) in &self.terms {
            out.add_term(mono_mul(n, m), d * c);
        }
        out
    }

    pub fn pow(&self, p: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..p {
            out = out.times(self);
        }
        out
    }

    /// Variables occurring with nonzero exponent.
    pub fn variables(&self) -> Vec<V> {
        let mut vs: Vec<V> = self.terms.keys().flat_map(|m| m.iter().map(|(v, _)| v.clone())).collect();
        vs.sort();
        vs.dedup();
        vs
    }

    /// Partial derivative with respect to `v`.
    pub fn derivative(&self, v: &V) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let Some(pos) = m.iter().position(|(w, _)| w == v) else {
                continue;
            };
            let e = m[pos].1;
            let mut n = m.clone();
            if e == 1 {
                n.remove(pos);
            } else {
                n[pos].1 -= 1;
            }
            out.add_term(n, c * BigRational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Reduction modulo the ideal generated by the variables selected by
    /// `vanishing`: drops every monomial containing one of them.
    pub fn reduce_vanishing(&self, vanishing: impl Fn(&V) -> bool) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| !m.iter().any(|(v, e)| *e > 0 && vanishing(v)))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Evaluate at a point. `None` if a variable is unassigned or a negative
    /// power hits zero.
    pub fn eval(&self, point: impl Fn(&V) -> Option<BigRational>) -> Option<BigRational> {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m {
                let x = point(v)?;
                if *e < 0 && x.is_zero() {
                    return None;
                }
                let base = if *e < 0 { x.recip() } else { x };
                for _ in 0..e.unsigned_abs() {
                    t *= &base;
                }
            }
            acc += t;
        }
        Some(acc)
    }

    pub fn map_vars<W: Ord + Clone + fmt::Debug>(&self, f: impl Fn(&V) -> W) -> Poly<W> {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let factors = m.iter().map(|(v, e)| (f(v), *e)).collect();
            out = out.plus(&Poly::monomial(factors, c.clone()));
        }
        out
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

    pub fn has_integer_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Render using a variable formatter.
    pub fn render(&self, name: impl Fn(&V) -> String) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (n, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if n > 0 {
                s.push_str(if neg { " - " } else { " + " });
            } else if neg {
                s.push('-');
            }
            let mag = c.abs();
            let body: Vec<String> = m
                .iter()
                .map(|(v, e)| if *e == 1 { name(v) } else { format!("{}^{}", name(v), e) })
                .collect();
            if body.is_empty() {
                s.push_str(&mag.to_string());
            } else {
                if !mag.is_one() {
                    s.push_str(&mag.to_string());
                    s.push('*');
                }
                s.push_str(&body.join("*"));
            }
        }
        s
    }
}

impl<V: Ord + Clone + fmt::Debug> Ring for Poly<V> {
    fn zero_like(&self) -> Self {
        Self::zero()
    }
    fn one_like(&self) -> Self {
        Self::one()
    }
    fn vanishes(&self) -> bool {
        self.terms.is_empty()
    }
    fn plus(&self, other: &Self) -> Self {
        let (mut big, small) = if self.terms.len() >= other.terms.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }
    fn times(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            for (n, d) in &other.terms {
                out.add_term(mono_mul(m, n), c * d);
            }
        }
        out
    }
    fn negate(&self) -> Self {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl<V: Ord + Clone + fmt::Debug + fmt::Display> fmt::Display for Poly<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(|v| v.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = Poly<u32>;

    #[test]
    fn cancellation_removes_terms() {
        let x = P::var(0);
        let y = P::var(1);
        let s = x.plus(&y).minus(&x);
        assert_eq!(s, y);
        assert_eq!(x.times(&P::monomial(vec![(0, -1)], rat(1))), P::one());
    }

    #[test]
    fn reduce_and_eval() {
        let x = P::var(0);
        let y = P::var(1);
        let p = x.times(&y).plus(&x.pow(2));
        assert_eq!(p.reduce_vanishing(|v| *v == 1), x.pow(2));
        let v = p.eval(|v| Some(rat(*v as i64 + 2))).unwrap();
        assert_eq!(v, rat(10));
    }

    #[test]
    fn signatures() {
        let x = P::var(0);
        assert_eq!(P::zero().signature(), Signature::Zero);
        assert_eq!(x.plus(&P::one()).signature(), Signature::AllPositive);
        assert_eq!(x.minus(&P::one()).signature(), Signature::Mixed);
        assert_eq!(x.negate().signature(), Signature::AllNegative);
    }
}
