//! Dense square matrices and LU factorization.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::{Error, Result};

/// Dense real square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RealMatrix {
    n: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row-major data. Entries must be finite.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Config("matrix data length is not n*n"));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("matrix entries must be finite"));
        }
        Ok(Self { n, data })
    }

    /// Builds a matrix from nested rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), n, "rows must form a square matrix");
            data.extend_from_slice(r);
        }
        Self { n, data }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        Self {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Square block starting at `(start, start)` with `len` rows.
    pub fn block(&self, start: usize, len: usize) -> Self {
        Self::from_fn(len, |i, j| self[(start + i, start + j)])
    }

    /// `‖QᵀQ − I‖_F`.
    pub fn orthogonality_defect(&self) -> f64 {
        let qtq = self.transpose().matmul(self);
        qtq.sub(&Self::identity(self.n)).frobenius_norm()
    }

    /// `self · other⁻¹`, computed by solving `otherᵀ · Xᵀ = selfᵀ`.
    pub fn right_divide(&self, other: &Self) -> Result<Self> {
        let n = self.n;
        let lu = Lu::factor(other.transpose().data, n)?;
        let mut out = Self::zeros(n);
        let mut col = vec![0.0; n];
        for i in 0..n {
            // Row i of the result is the solution of otherᵀ x = (row i of self)ᵀ.
            col.copy_from_slice(self.row(i));
            lu.solve_in_place(&mut col);
            out.data[i * n..(i + 1) * n].copy_from_slice(&col);
        }
        Ok(out)
    }

    pub fn determinant(&self) -> f64 {
        match Lu::factor(self.data.clone(), self.n) {
            Ok(lu) => lu.determinant(),
            Err(_) => 0.0,
        }
    }

    /// `det(z·I − self)` for a complex shift `z`.
    pub fn shifted_determinant(&self, z: Complex64) -> Complex64 {
        let n = self.n;
        let data: Vec<Complex64> = (0..n * n)
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                let d = if i == j { z } else { Complex64::zero() };
                d - self.data[idx]
            })
            .collect();
        match Lu::factor(data, n) {
            Ok(lu) => lu.determinant(),
            Err(_) => Complex64::zero(),
        }
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Field element usable by [`Lu`].
pub trait LuScalar:
    Copy
    + Zero
    + One
    + PartialEq
    + core::ops::Sub<Output = Self>
    + core::ops::Mul<Output = Self>
    + core::ops::Neg<Output = Self>
{
    fn magnitude(self) -> f64;
    fn quotient(self, rhs: Self) -> Self;
}

impl LuScalar for f64 {
    #[inline]
    fn magnitude(self) -> f64 {
        self.abs()
    }
    #[inline]
    fn quotient(self, rhs: Self) -> Self {
        self / rhs
    }
}

impl LuScalar for Complex64 {
    #[inline]
    fn magnitude(self) -> f64 {
        self.norm()
    }
    /// Real divisors divide componentwise, so a complex factorization of a
    /// real matrix reproduces the real factorization bit for bit.
    #[inline]
    fn quotient(self, rhs: Self) -> Self {
        if rhs.im == 0.0 {
            Complex64::new(self.re / rhs.re, self.im / rhs.re)
        } else {
            self / rhs
        }
    }
}

/// LU factorization with partial pivoting, `P·A = L·U`.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    n: usize,
    lu: Vec<T>,
    perm: Vec<usize>,
    swaps: usize,
}

impl<T: LuScalar> Lu<T> {
    /// Factors row-major `a` of size `n×n`. Exactly zero pivots are reported
    /// as [`Error::Singular`].
    pub fn factor(mut a: Vec<T>, n: usize) -> Result<Self> {
        debug_assert_eq!(a.len(), n * n);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|i| (i, a[i * n + k].magnitude()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                let factor = a[i * n + k].quotient(pivot);
                a[i * n + k] = factor;
                if factor == T::zero() {
                    continue;
                }
                let (upper, lower) = a.split_at_mut(i * n);
                let pivot_row = &upper[k * n + k + 1..k * n + n];
                let row = &mut lower[k + 1..n];
                for (x, &u) in row.iter_mut().zip(pivot_row) {
                    *x = *x - factor * u;
                }
            }
        }
        Ok(Self { n, lu: a, perm, swaps })
    }

    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.n;
        let permuted: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        b.copy_from_slice(&permuted);
        for i in 0..n {
            let mut s = b[i];
            for j in 0..i {
                s = s - self.lu[i * n + j] * b[j];
            }
            b[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..n {
                s = s - self.lu[i * n + j] * b[j];
            }
            b[i] = s.quotient(self.lu[i * n + i]);
        }
    }

    pub fn determinant(&self) -> T {
        let mut d = T::one();
        for i in 0..self.n {
            d = d * self.lu[i * self.n + i];
        }
        if self.swaps % 2 == 1 {
            -d
        } else {
            d
        }
    }

    /// Ratio of the largest to the smallest pivot magnitude; a cheap
    /// lower bound on the condition number.
    pub fn pivot_ratio(&self) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..self.n {
            let m = self.lu[i * self.n + i].magnitude();
            lo = lo.min(m);
            hi = hi.max(m);
        }
        hi / lo
    }
}
