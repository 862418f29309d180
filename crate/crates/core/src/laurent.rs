//! Laurent polynomials in `q^{1/4}` with integer coefficients.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::ring::Ring;

/// `Σ c_e q^{e/4}`.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct QPoly {
    terms: BTreeMap<i32, BigInt>,
}

/// One term of the serialized form, exponent in units of `q^{1/2}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct HalfTerm {
    pub qhalf: i32,
    pub coeff: i64,
}

impl QPoly {
    pub fn zero() -> Self {
        QPoly::default()
    }

    pub fn one() -> Self {
        QPoly::monomial(0, 1)
    }

    /// `c · q^{quarters/4}`.
    pub fn monomial(quarters: i32, c: impl Into<BigInt>) -> Self {
        let mut p = QPoly::zero();
        p.add_term(quarters, c.into());
        p
    }

    /// `c · q^{halves/2}`.
    pub fn half(halves: i32, c: i64) -> Self {
        QPoly::monomial(2 * halves, c)
    }

    pub fn constant(c: i64) -> Self {
        QPoly::monomial(0, c)
    }

    fn add_term(&mut self, e: i32, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
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

    pub fn terms(&self) -> impl Iterator<Item = (i32, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Some((exponent, coeff)) when the polynomial is a single term.
    pub fn as_monomial(&self) -> Option<(i32, &BigInt)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(e, c)| (*e, c))
        } else {
            None
        }
    }

    /// Exact division by a unit monomial `±q^{e/4}`.
    pub fn div_unit(&self, e: i32, c: &BigInt) -> Option<QPoly> {
        if !(c.is_one() || (-c).is_one()) {
            return None;
        }
        let mut out = QPoly::zero();
        for (f, d) in &self.terms {
            out.add_term(f - e, d * c);
        }
        Some(out)
    }

    /// Value at `q = 1`.
    pub fn at_one(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |a, c| a + c)
    }

    /// Derivative with respect to `log q`, at `q = 1`.
    pub fn log_derivative_at_one(&self) -> BigRational {
        self.terms.iter().fold(BigRational::zero(), |a, (e, c)| {
            a + BigRational::new(c * BigInt::from(*e), BigInt::from(4))
        })
    }

    /// `q ↦ q^{-1}`.
    pub fn bar(&self) -> QPoly {
        QPoly { terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect() }
    }

    /// Serialized form in `q^{1/2}` units. Fails on odd quarter exponents.
    pub fn to_half_terms(&self) -> Option<Vec<HalfTerm>> {
        self.terms
            .iter()
            .map(|(e, c)| {
                if e % 2 != 0 {
                    return None;
                }
                let coeff = i64::try_from(c).ok()?;
                Some(HalfTerm { qhalf: e / 2, coeff })
            })
            .collect()
    }
}

impl Ring for QPoly {
    fn zero_like(&self) -> Self {
        QPoly::zero()
    }
    fn one_like(&self) -> Self {
        QPoly::one()
    }
    fn vanishes(&self) -> bool {
        self.terms.is_empty()
    }
    fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
    fn times(&self, other: &Self) -> Self {
        let mut out = QPoly::zero();
        for (e, c) in &self.terms {
            for (f, d) in &other.terms {
                out.add_term(e + f, c * d);
            }
        }
        out
    }
    fn negate(&self) -> Self {
        QPoly { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else if n > 0 { "+" } else { "" };
            let mag = c.abs();
            write!(f, "{sign}")?;
            if *e == 0 {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}*")?;
                }
                if e % 4 == 0 {
                    write!(f, "q^{}", e / 4)?;
                } else if e % 2 == 0 {
                    write!(f, "q^({}/2)", e / 2)?;
                } else {
                    write!(f, "q^({}/4)", e)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_of_units() {
        let a = QPoly::half(1, 1).minus(&QPoly::half(-3, 1));
        let b = QPoly::half(1, 1);
        assert_eq!(a.times(&b), QPoly::half(2, 1).minus(&QPoly::half(-2, 1)));
        assert_eq!(a.at_one(), BigInt::zero());
    }

    #[test]
    fn log_derivative() {
        let a = QPoly::half(1, 1).minus(&QPoly::half(-3, 1));
        assert_eq!(a.log_derivative_at_one(), BigRational::from_integer(2.into()));
    }

    #[test]
    fn unit_division() {
        let a = QPoly::half(3, 2).plus(&QPoly::half(1, 1));
        let b = a.div_unit(2, &BigInt::from(-1)).unwrap();
        assert_eq!(b.times(&QPoly::monomial(2, -1)), a);
        assert!(a.div_unit(0, &BigInt::from(2)).is_none());
    }
}
