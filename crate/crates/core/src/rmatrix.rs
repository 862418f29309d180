//! The trigonometric SL_k R-matrix, the flip operator and their identities.
//!
//! Basis convention: `e_i ⊗ e_j` sits at row `i·k + j`.

use num_rational::BigRational;
use serde::Serialize;

use crate::laurent::{HalfTerm, QPoly};
use crate::poly::{rat, ratio};
use crate::ring::{Mat, Mismatch, Ring};

pub type RMatrix = Mat<QPoly>;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RMatrixError {
    #[error("dimension k must be at least 2, got {0}")]
    Dimension(usize),
    #[error("matrix is not invertible over the Laurent ring")]
    NotInvertible,
    #[error("matrix is {0}x{1}, expected a square k^2 x k^2 matrix")]
    Shape(usize, usize),
}

fn idx(k: usize, i: usize, j: usize) -> usize {
    i * k + j
}

/// `Σ_{i≠j} q^{-1/2} e_ii⊗e_jj + Σ_i q^{1/2} e_ii⊗e_ii + Σ_{j>i} (q^{1/2}-q^{-3/2}) e_ij⊗e_ji`.
pub fn kulish_sklyanin(k: usize) -> Result<RMatrix, RMatrixError> {
    if k < 2 {
        return Err(RMatrixError::Dimension(k));
    }
    let n = k * k;
    let mut r = Mat::zeros(n, n, &QPoly::zero());
    for i in 0..k {
        for j in 0..k {
            let d = if i == j { QPoly::half(1, 1) } else { QPoly::half(-1, 1) };
            r.set(idx(k, i, j), idx(k, i, j), d);
        }
    }
    let off = QPoly::half(1, 1).minus(&QPoly::half(-3, 1));
    for i in 0..k {
        for j in i + 1..k {
            // e_ij ⊗ e_ji maps e_j⊗e_i to e_i⊗e_j
            r.set(idx(k, i, j), idx(k, j, i), off.clone());
        }
    }
    Ok(r)
}

/// The explicit 4x4 matrix displayed for k = 2.
pub fn displayed_k2() -> RMatrix {
    let z = QPoly::zero();
    let p = QPoly::half(1, 1);
    let m = QPoly::half(-1, 1);
    let off = QPoly::half(1, 1).minus(&QPoly::half(-3, 1));
    Mat::from_rows(vec![
        vec![p.clone(), z.clone(), z.clone(), z.clone()],
        vec![z.clone(), m.clone(), off, z.clone()],
        vec![z.clone(), z.clone(), m, z.clone()],
        vec![z.clone(), z.clone(), z, p],
    ])
}

/// The k = 2 inline formula `Σ e_ii⊗e_jj q^{e·(-1)^{i+j}} + e_12⊗e_21 (q^{1/2}-q^{-3/2})`
/// with diagonal exponent magnitude `quarters/4`.
pub fn inline_k2(quarters: i32) -> RMatrix {
    let mut r = Mat::zeros(4, 4, &QPoly::zero());
    for i in 0..2 {
        for j in 0..2 {
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            r.set(idx(2, i, j), idx(2, i, j), QPoly::monomial(sign * quarters, 1));
        }
    }
    r.set(idx(2, 0, 1), idx(2, 1, 0), QPoly::half(1, 1).minus(&QPoly::half(-3, 1)));
    r
}

/// `P = Σ e_ij ⊗ e_ji`.
pub fn permutation(k: usize) -> RMatrix {
    let n = k * k;
    let mut p = Mat::zeros(n, n, &QPoly::zero());
    for i in 0..k {
        for j in 0..k {
            p.set(idx(k, i, j), idx(k, j, i), QPoly::one());
        }
    }
    p
}

fn dim_of(r: &RMatrix) -> Result<usize, RMatrixError> {
    if !r.is_square() {
        return Err(RMatrixError::Shape(r.rows(), r.cols()));
    }
    let n = r.rows();
    let k = (n as f64).sqrt().round() as usize;
    if k * k != n || k < 2 {
        return Err(RMatrixError::Shape(n, n));
    }
    Ok(k)
}

/// Embeddings of a two-slot operator into three slots.
fn slots(r: &RMatrix, k: usize) -> (RMatrix, RMatrix, RMatrix) {
    let id = Mat::identity(k, &QPoly::zero());
    let r12 = r.kron(&id);
    let r23 = id.kron(r);
    let p23 = id.kron(&permutation(k));
    let r13 = p23.mul(&r12).mul(&p23);
    (r12, r13, r23)
}

/// `R12 R13 R23 = R23 R13 R12`, expanded exactly.
pub fn check_qybe(r: &RMatrix) -> Result<Result<(), Mismatch<QPoly>>, RMatrixError> {
    let k = dim_of(r)?;
    let (r12, r13, r23) = slots(r, k);
    let lhs = r12.mul(&r13).mul(&r23);
    let rhs = r23.mul(&r13).mul(&r12);
    Ok(match lhs.first_mismatch(&rhs) {
        None => Ok(()),
        Some(w) => Err(w),
    })
}

/// `R12ᵀ = R21 = P R12 P`.
pub fn check_skew_transpose(r: &RMatrix) -> Result<Result<(), Mismatch<QPoly>>, RMatrixError> {
    let k = dim_of(r)?;
    let p = permutation(k);
    let r21 = p.mul(r).mul(&p);
    Ok(match r.transpose().first_mismatch(&r21) {
        None => Ok(()),
        Some(w) => Err(w),
    })
}

/// Inverse by Gauss-Jordan elimination, pivoting only on unit monomials.
pub fn invert(r: &RMatrix) -> Result<RMatrix, RMatrixError> {
    if !r.is_square() {
        return Err(RMatrixError::Shape(r.rows(), r.cols()));
    }
    let n = r.rows();
    let mut a = r.clone();
    let mut inv = Mat::identity(n, &QPoly::zero());
    for col in 0..n {
        let pivot = (col..n).find(|&row| {
            a.get(row, col)
                .as_monomial()
                .map(|(_, c)| num_traits::One::is_one(c) || num_traits::One::is_one(&-c))
                .unwrap_or(false)
        });
        let Some(prow) = pivot else {
            return Err(RMatrixError::NotInvertible);
        };
        if prow != col {
            for j in 0..n {
                let (x, y) = (a.get(col, j).clone(), a.get(prow, j).clone());
                a.set(col, j, y);
                a.set(prow, j, x);
                let (x, y) = (inv.get(col, j).clone(), inv.get(prow, j).clone());
                inv.set(col, j, y);
                inv.set(prow, j, x);
            }
        }
        let (e, c) = {
            let (e, c) = a.get(col, col).as_monomial().expect("unit pivot");
            (e, c.clone())
        };
        for j in 0..n {
            let x = a.get(col, j).div_unit(e, &c).expect("unit");
            a.set(col, j, x);
            let y = inv.get(col, j).div_unit(e, &c).expect("unit");
            inv.set(col, j, y);
        }
        for row in 0..n {
            if row == col || a.get(row, col).vanishes() {
                continue;
            }
            let f = a.get(row, col).clone();
            for j in 0..n {
                let x = a.get(row, j).minus(&f.times(a.get(col, j)));
                a.set(row, j, x);
                let y = inv.get(row, j).minus(&f.times(inv.get(col, j)));
                inv.set(row, j, y);
            }
        }
    }
    Ok(inv)
}

/// `q^{1/2} R − q^{-1/2} R^{-T} = (q − q^{-1}) P`.
pub fn check_hecke(r: &RMatrix) -> Result<Result<(), Mismatch<QPoly>>, RMatrixError> {
    let k = dim_of(r)?;
    let rmt = invert(&r.transpose())?;
    let lhs = r.scale(&QPoly::half(1, 1)).sub(&rmt.scale(&QPoly::half(-1, 1)));
    let rhs = permutation(k).scale(&QPoly::half(2, 1).minus(&QPoly::half(-2, 1)));
    Ok(match lhs.first_mismatch(&rhs) {
        None => Ok(()),
        Some(w) => Err(w),
    })
}

/// `r = ½ Σ e_ii⊗e_jj − Σ e_ii⊗e_ii − 2 Σ_{j>i} e_ij⊗e_ji`.
pub fn semiclassical_r(k: usize) -> Mat<BigRational> {
    let n = k * k;
    let mut r = Mat::zeros(n, n, &rat(0));
    for i in 0..k {
        for j in 0..k {
            let v = if i == j { ratio(-1, 2) } else { ratio(1, 2) };
            r.set(idx(k, i, j), idx(k, i, j), v);
        }
    }
    for i in 0..k {
        for j in i + 1..k {
            r.set(idx(k, i, j), idx(k, j, i), rat(-2));
        }
    }
    r
}

/// Coefficient of `iπħ` in each entry under `q = e^{-iπħ}`.
pub fn first_order(r: &RMatrix) -> Mat<BigRational> {
    r.map(|p| -p.log_derivative_at_one())
}

/// Value at `q = 1`.
pub fn at_one(r: &RMatrix) -> Mat<BigRational> {
    r.map(|p| BigRational::from_integer(p.at_one()))
}

#[derive(Serialize)]
pub struct DumpEntry {
    pub row: usize,
    pub col: usize,
    pub poly: Vec<HalfTerm>,
}

#[derive(Serialize)]
pub struct Dump {
    pub k: usize,
    pub entries: Vec<DumpEntry>,
}

/// Sparse JSON-ready dump; only nonzero entries with half-integer exponents.
pub fn dump(r: &RMatrix) -> Result<Dump, RMatrixError> {
    let k = dim_of(r)?;
    let mut entries = Vec::new();
    for i in 0..r.rows() {
        for j in 0..r.cols() {
            let p = r.get(i, j);
            if p.vanishes() {
                continue;
            }
            let poly = p.to_half_terms().ok_or(RMatrixError::NotInvertible)?;
            entries.push(DumpEntry { row: i, col: j, poly });
        }
    }
    Ok(Dump { k, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k2_matches_display() {
        assert_eq!(kulish_sklyanin(2).unwrap(), displayed_k2());
        assert_ne!(inline_k2(4), displayed_k2());
        assert_eq!(inline_k2(2), displayed_k2());
    }

    #[test]
    fn off_diagonal_slot_k3() {
        let r = kulish_sklyanin(3).unwrap();
        let off = QPoly::half(1, 1).minus(&QPoly::half(-3, 1));
        assert_eq!(r.get(idx(3, 0, 1), idx(3, 1, 0)), &off);
        assert!(r.get(idx(3, 1, 0), idx(3, 0, 1)).vanishes());
    }

    #[test]
    fn identities_hold() {
        for k in 2..=3 {
            let r = kulish_sklyanin(k).unwrap();
            assert!(check_qybe(&r).unwrap().is_ok());
            assert!(check_skew_transpose(&r).unwrap().is_ok());
            assert!(check_hecke(&r).unwrap().is_ok());
            assert_eq!(at_one(&r), Mat::identity(k * k, &rat(0)));
            assert_eq!(first_order(&r), semiclassical_r(k));
        }
    }

    #[test]
    fn perturbed_fails_qybe() {
        let mut r = permutation(2);
        // P + e11 ⊗ e12
        let x = r.get(idx(2, 0, 0), idx(2, 0, 1)).plus(&QPoly::one());
        r.set(idx(2, 0, 0), idx(2, 0, 1), x);
        assert!(check_qybe(&r).unwrap().is_err());
        assert!(check_skew_transpose(&r).unwrap().is_err());
    }

    #[test]
    fn permutation_is_not_hecke() {
        assert!(check_hecke(&permutation(2)).unwrap().is_err());
    }

    #[test]
    fn inverse_roundtrip() {
        let r = kulish_sklyanin(3).unwrap();
        let ri = invert(&r).unwrap();
        assert_eq!(r.mul(&ri), Mat::identity(9, &QPoly::zero()));
        assert_eq!(invert(&Mat::zeros(4, 4, &QPoly::zero())), Err(RMatrixError::NotInvertible));
        assert_eq!(kulish_sklyanin(1), Err(RMatrixError::Dimension(1)));
    }
}
