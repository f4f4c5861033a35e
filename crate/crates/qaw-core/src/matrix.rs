//! Dense matrices over a [`Scalar`] ring.
//!
//! Row-major storage; sizes here are desk scale (a few thousand at most), so
//! everything is straightforward O(n^3) linear algebra. Pivot selection uses
//! the `f64` approximation of entry magnitudes, which keeps exact runs exact
//! (row choice never changes values, only ordering).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::scalar::Scalar;
use crate::{Error, Result};

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_assign_at(&mut self, i: usize, j: usize, v: &S) {
        let e = &mut self.data[i * self.cols + j];
        *e = e.add(v);
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.mul(c)).collect(),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    out.add_assign_at(i, j, &a.mul(b));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "mul_vec shape");
        let mut out = vec![S::zero(); self.rows];
        for i in 0..self.rows {
            let mut acc = S::zero();
            for j in 0..self.cols {
                let a = self.get(i, j);
                if !a.is_zero() {
                    acc = acc.add(&a.mul(&v[j]));
                }
            }
            out[i] = acc;
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Entrywise conjugation.
    pub fn conj(&self) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(S::conj).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(S::is_zero)
    }

    pub fn is_hermitian(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in i..self.cols {
                if *self.get(i, j) != self.get(j, i).conj() {
                    return false;
                }
            }
        }
        true
    }

    /// Largest entry magnitude in `f64` approximation.
    pub fn max_abs_approx(&self) -> f64 {
        self.data
            .iter()
            .map(|x| {
                let c = x.approx();
                libm::hypot(c.re, c.im)
            })
            .fold(0.0, f64::max)
    }

    pub fn kron(&self, rhs: &Self) -> Self {
        let (r1, c1, r2, c2) = (self.rows, self.cols, rhs.rows, rhs.cols);
        Self::from_fn(r1 * r2, c1 * c2, |i, j| {
            self.get(i / r2, j / c2).mul(rhs.get(i % r2, j % c2))
        })
    }

    /// Solve `self * X = B` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &Self) -> Result<Self> {
        assert_eq!(self.rows, self.cols, "solve: square matrix required");
        assert_eq!(self.rows, b.rows, "solve: rhs rows");
        let n = self.rows;
        let mut a = self.clone();
        let mut x = b.clone();
        for col in 0..n {
            // partial pivot by approximate magnitude
            let mut piv = col;
            let mut best = {
                let c = a.get(col, col).approx();
                libm::hypot(c.re, c.im)
            };
            for r in col + 1..n {
                let c = a.get(r, col).approx();
                let mag = libm::hypot(c.re, c.im);
                if mag > best {
                    best = mag;
                    piv = r;
                }
            }
            if a.get(piv, col).is_zero() {
                return Err(Error::Singular(format!("pivot at column {col}")));
            }
            if piv != col {
                a.swap_rows(piv, col);
                x.swap_rows(piv, col);
            }
            let inv = S::one().div(a.get(col, col));
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).mul(&inv);
                for j in col..n {
                    let v = a.get(r, j).sub(&factor.mul(a.get(col, j)));
                    a.set(r, j, v);
                }
                for j in 0..x.cols {
                    let v = x.get(r, j).sub(&factor.mul(x.get(col, j)));
                    x.set(r, j, v);
                }
            }
        }
        for i in 0..n {
            let inv = S::one().div(a.get(i, i));
            for j in 0..x.cols {
                let v = x.get(i, j).mul(&inv);
                x.set(i, j, v);
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Self> {
        self.solve(&Self::identity(self.rows))
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.cols {
            self.data.swap(i * self.cols + k, j * self.cols + k);
        }
    }

    /// Pivots of the LDL^H factorization of a Hermitian matrix, without
    /// row exchanges. All pivots strictly positive iff positive definite.
    /// Fails with `GramNotPositive` on a zero pivot.
    pub fn ldl_pivots(&self) -> Result<Vec<S>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut pivots = Vec::with_capacity(n);
        for k in 0..n {
            let d = a.get(k, k).clone();
            if d.is_zero() {
                return Err(Error::GramNotPositive(format!("zero pivot at {k}")));
            }
            pivots.push(d.clone());
            for i in k + 1..n {
                let l = a.get(i, k).div(&d);
                if l.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let v = a.get(i, j).sub(&l.mul(&a.get(k, j).clone()));
                    a.set(i, j, v);
                }
            }
        }
        Ok(pivots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::CRat;

    fn m(rows: &[&[i64]]) -> Matrix<CRat> {
        Matrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| CRat::from_i64(x)).collect()).collect(),
        )
    }

    #[test]
    fn solve_and_inverse_exact() {
        let a = m(&[&[2, 1], &[1, 3]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.matmul(&inv), Matrix::identity(2));
    }

    #[test]
    fn singular_detected() {
        let a = m(&[&[1, 2], &[2, 4]]);
        assert!(a.inverse().is_err());
    }

    #[test]
    fn ldl_pivots_positive_definite() {
        let a = m(&[&[2, 1], &[1, 3]]);
        let p = a.ldl_pivots().unwrap();
        assert!(p.iter().all(|x| x.is_positive_real()));
        // indefinite
        let b = m(&[&[1, 2], &[2, 1]]);
        let p = b.ldl_pivots().unwrap();
        assert!(!p.iter().all(|x| x.is_positive_real()));
    }

    #[test]
    fn kron_shapes_and_values() {
        let a = m(&[&[1, 2]]);
        let b = m(&[&[3], &[4]]);
        let k = a.kron(&b);
        assert_eq!((k.rows(), k.cols()), (2, 2));
        assert_eq!(*k.get(1, 1), CRat::from_i64(8));
    }
}
