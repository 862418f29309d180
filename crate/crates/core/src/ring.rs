//! Minimal ring interface and dense matrices over it.

use std::fmt;

/// Arithmetic needed by [`Mat`]. Zero and one are produced from an existing
/// value so that context-carrying rings (quantum tori) can supply their algebra.
pub trait Ring: Clone + PartialEq + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn vanishes(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negate(&self) -> Self;

    fn minus(&self, other: &Self) -> Self {
        self.plus(&other.negate())
    }
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// First differing entry of two matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Mismatch<T> {
    pub row: usize,
    pub col: usize,
    pub left: T,
    pub right: T,
}

impl<T: Ring> Mat<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn zeros(rows: usize, cols: usize, like: &T) -> Self {
        let z = like.zero_like();
        Mat { rows, cols, data: vec![z; rows * cols] }
    }

    pub fn identity(n: usize, like: &T) -> Self {
        let (z, o) = (like.zero_like(), like.one_like());
        Mat::from_fn(n, n, |i, j| if i == j { o.clone() } else { z.clone() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn mul(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let like = &self.data[0];
        let mut out = Mat::zeros(self.rows, other.cols, like);
        for i in 0..self.rows {
            for t in 0..self.cols {
                let a = self.get(i, t);
                if a.vanishes() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(t, j);
                    if b.vanishes() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx].plus(&a.times(b));
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.plus(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.minus(b)).collect(),
        }
    }

    pub fn neg(&self) -> Mat<T> {
        self.map(|x| x.negate())
    }

    /// Multiply every entry on the left by `s`.
    pub fn scale(&self, s: &T) -> Mat<T> {
        self.map(|x| s.times(x))
    }

    pub fn transpose(&self) -> Mat<T> {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn trace(&self) -> T {
        let mut acc = self.data[0].zero_like();
        for i in 0..self.rows.min(self.cols) {
            acc = acc.plus(self.get(i, i));
        }
        acc
    }

    /// `self ⊗ I_n`: the matrix acting in the first tensor slot.
    pub fn kron_left(&self, n: usize) -> Mat<T> {
        let like = &self.data[0];
        let mut out = Mat::zeros(self.rows * n, self.cols * n, like);
        for i in 0..self.rows {
            for j in 0..self.cols {
                for t in 0..n {
                    out.set(i * n + t, j * n + t, self.get(i, j).clone());
                }
            }
        }
        out
    }

    /// `I_n ⊗ self`: the matrix acting in the second tensor slot.
    pub fn kron_right(&self, n: usize) -> Mat<T> {
        let like = &self.data[0];
        let mut out = Mat::zeros(self.rows * n, self.cols * n, like);
        for t in 0..n {
            for i in 0..self.rows {
                for j in 0..self.cols {
                    out.set(t * self.rows + i, t * self.cols + j, self.get(i, j).clone());
                }
            }
        }
        out
    }

    pub fn kron(&self, other: &Mat<T>) -> Mat<T> {
        let like = &self.data[0];
        let (r2, c2) = (other.rows, other.cols);
        let mut out = Mat::zeros(self.rows * r2, self.cols * c2, like);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.vanishes() {
                    continue;
                }
                for k in 0..r2 {
                    for l in 0..c2 {
                        out.set(i * r2 + k, j * c2 + l, a.times(other.get(k, l)));
                    }
                }
            }
        }
        out
    }

    /// Non-negative integer power.
    pub fn pow(&self, p: u32) -> Mat<T> {
        let mut out = Mat::identity(self.rows, &self.data[0]);
        for _ in 0..p {
            out = out.mul(self);
        }
        out
    }

    /// First entry (row-major) where the two matrices differ.
    pub fn first_mismatch(&self, other: &Mat<T>) -> Option<Mismatch<T>> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for i in 0..self.rows {
            for j in 0..self.cols {
                let (a, b) = (self.get(i, j), other.get(i, j));
                if a != b {
                    return Some(Mismatch { row: i, col: j, left: a.clone(), right: b.clone() });
                }
            }
        }
        None
    }

    /// Determinant by cofactor expansion; intended for small matrices only.
    pub fn det(&self) -> T {
        assert!(self.is_square());
        let n = self.rows;
        let like = &self.data[0];
        if n == 0 {
            return like.one_like();
        }
        if n == 1 {
            return self.get(0, 0).clone();
        }
        let mut acc = like.zero_like();
        for c in 0..n {
            let a = self.get(0, c);
            if a.vanishes() {
                continue;
            }
            let minor = Mat::from_fn(n - 1, n - 1, |i, j| {
                let jj = if j < c { j } else { j + 1 };
                self.get(i + 1, jj).clone()
            });
            let term = a.times(&minor.det());
            acc = if c % 2 == 0 { acc.plus(&term) } else { acc.minus(&term) };
        }
        acc
    }

    /// Leading principal submatrix of size `d`.
    pub fn upper_left(&self, d: usize) -> Mat<T> {
        Mat::from_fn(d, d, |i, j| self.get(i, j).clone())
    }

    /// Trailing principal submatrix of size `d`.
    pub fn lower_right(&self, d: usize) -> Mat<T> {
        let (r0, c0) = (self.rows - d, self.cols - d);
        Mat::from_fn(d, d, |i, j| self.get(r0 + i, c0 + j).clone())
    }
}

impl<T: Ring + fmt::Display> fmt::Display for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

impl Ring for num_rational::BigRational {
    fn zero_like(&self) -> Self {
        num_traits::Zero::zero()
    }
    fn one_like(&self) -> Self {
        num_traits::One::one()
    }
    fn vanishes(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negate(&self) -> Self {
        -self
    }
}

impl Ring for num_bigint::BigInt {
    fn zero_like(&self) -> Self {
        num_traits::Zero::zero()
    }
    fn one_like(&self) -> Self {
        num_traits::One::one()
    }
    fn vanishes(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negate(&self) -> Self {
        -self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn m(rows: Vec<Vec<i64>>) -> Mat<BigInt> {
        Mat::from_rows(rows.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect())
    }

    #[test]
    fn product_and_det() {
        let a = m(vec![vec![1, 2], vec![3, 4]]);
        let b = m(vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(a.mul(&b), m(vec![vec![2, 1], vec![4, 3]]));
        assert_eq!(a.det(), BigInt::from(-2));
    }

    #[test]
    fn kron_slots_commute() {
        let a = m(vec![vec![1, 2], vec![3, 4]]);
        let b = m(vec![vec![5, 6], vec![7, 8]]);
        let l = a.kron_left(2).mul(&b.kron_right(2));
        let r = b.kron_right(2).mul(&a.kron_left(2));
        assert_eq!(l, r);
        assert_eq!(l, a.kron(&b));
    }

    #[test]
    fn mismatch_is_row_major() {
        let a = m(vec![vec![1, 2], vec![3, 4]]);
        let b = m(vec![vec![1, 0], vec![0, 4]]);
        let w = a.first_mismatch(&b).unwrap();
        assert_eq!((w.row, w.col), (0, 1));
    }
}
