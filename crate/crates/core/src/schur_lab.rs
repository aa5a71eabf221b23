//! Partial real Schur decompositions and the Jacobians of the induced change
//! of variables.
//!
//! A real eigenvalue pair is deflated into an upper-triangular 2×2 corner
//!
//! ```text
//!     ⎡ x1  t12  T1 ⎤
//! X = O ⎢  0   x2     ⎥ Oᵀ
//!     ⎣  0    0   Y1 ⎦
//! ```
//!
//! and a complex pair `x ± iy` into a standardized corner `[[x, b], [−c, x]]`
//! with `b·c = y²`, `b ≥ c > 0`. `O` is a product of Householder reflections
//! (plus an in-plane rotation for the complex case). Eigenvectors come from
//! inverse iteration at the claimed eigenvalue, so inputs only need to be
//! accurate to about `1e−8`; the blocks report the refined values.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::eigen::{householder, standardize_2x2};
use crate::matrix::{Lu, LuScalar};
use crate::{Error, RealMatrix, Result};

/// Relative residual `‖Xv − λv‖/‖X‖_F` accepted for a claimed eigenvalue.
pub const EIGENVALUE_RESIDUAL_TOL: f64 = 1e-8;

/// Eigenvalue condition number above which a pair counts as defective.
pub const DEFECTIVE_CONDITION: f64 = 1e12;

const INVERSE_ITERATIONS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct RealPairDecomposition {
    pub o: RealMatrix,
    pub x1: f64,
    pub x2: f64,
    pub t12: f64,
    /// 2×(n−2) coupling block, row-major.
    pub t1: Vec<f64>,
    pub y1: RealMatrix,
}

impl RealPairDecomposition {
    /// The quasi-triangular middle factor `X₁`.
    pub fn middle(&self) -> RealMatrix {
        let m = self.y1.n();
        let mut x = RealMatrix::zeros(m + 2);
        x[(0, 0)] = self.x1;
        x[(0, 1)] = self.t12;
        x[(1, 1)] = self.x2;
        place_tail(&mut x, &self.t1, &self.y1);
        x
    }

    pub fn reconstruct(&self) -> RealMatrix {
        self.o.matmul(&self.middle()).matmul(&self.o.transpose())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPairDecomposition {
    pub o: RealMatrix,
    pub x: f64,
    pub y: f64,
    pub b: f64,
    pub c: f64,
    /// `b − c`; non-negative under the `b ≥ c` convention.
    pub eta: f64,
    /// 2×(n−2) coupling block, row-major.
    pub t2: Vec<f64>,
    pub y2: RealMatrix,
}

impl ComplexPairDecomposition {
    pub fn middle(&self) -> RealMatrix {
        let m = self.y2.n();
        let mut x = RealMatrix::zeros(m + 2);
        x[(0, 0)] = self.x;
        x[(0, 1)] = self.b;
        x[(1, 0)] = -self.c;
        x[(1, 1)] = self.x;
        place_tail(&mut x, &self.t2, &self.y2);
        x
    }

    pub fn reconstruct(&self) -> RealMatrix {
        self.o.matmul(&self.middle()).matmul(&self.o.transpose())
    }

    /// `|y² − b·c| / y²`.
    pub fn pair_relation_error(&self) -> f64 {
        (self.y * self.y - self.b * self.c).abs() / (self.y * self.y)
    }
}

fn place_tail(x: &mut RealMatrix, t: &[f64], y: &RealMatrix) {
    let m = y.n();
    for r in 0..2 {
        for j in 0..m {
            x[(r, 2 + j)] = t[r * m + j];
        }
    }
    for i in 0..m {
        for j in 0..m {
            x[(2 + i, 2 + j)] = y[(i, j)];
        }
    }
}

fn split_tail(x: &RealMatrix) -> (Vec<f64>, RealMatrix) {
    let n = x.n();
    let m = n - 2;
    let mut t = vec![0.0; 2 * m];
    for r in 0..2 {
        for j in 0..m {
            t[r * m + j] = x[(r, 2 + j)];
        }
    }
    (t, RealMatrix::from_fn(m, |i, j| x[(2 + i, 2 + j)]))
}

/// Dense `I − τvvᵀ` acting on indices `offset..n`, with `v[0] = 1`.
fn reflector(n: usize, offset: usize, v: &[f64], tau: f64) -> RealMatrix {
    let mut h = RealMatrix::identity(n);
    for i in 0..v.len() {
        for j in 0..v.len() {
            h[(offset + i, offset + j)] -= tau * v[i] * v[j];
        }
    }
    h
}

/// Reflector sending `x` (living on `offset..n`) to a multiple of `e_offset`.
fn reflector_for(n: usize, offset: usize, x: &[f64]) -> RealMatrix {
    let mut v = x.to_vec();
    let (_, tau) = householder(&mut v);
    v[0] = 1.0;
    reflector(n, offset, &v, tau)
}

fn norm<T: LuScalar>(v: &[T]) -> f64 {
    v.iter().map(|x| x.magnitude() * x.magnitude()).sum::<f64>().sqrt()
}

/// Deterministic, generic start vector.
fn start_vector<T: LuScalar + From<f64>>(n: usize) -> Vec<T> {
    (0..n).map(|i| T::from(1.0 + 0.5 / (i + 1) as f64 + 0.0625 * ((i * 7) % 5) as f64)).collect()
}

/// Eigenvector of `a` (row-major, n×n) for the eigenvalue nearest `mu`, and
/// the condition number `‖u‖‖v‖/|uᵀv|` from the matching left vector.
fn eigenvector<T>(a: &[f64], n: usize, mu: T, scale: f64) -> Result<(Vec<T>, f64)>
where
    T: LuScalar + From<f64> + core::ops::Mul<f64, Output = T> + core::ops::Add<Output = T>,
{
    let shifted = |shift: T, transpose: bool| -> Vec<T> {
        (0..n * n)
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                let src = if transpose { a[j * n + i] } else { a[idx] };
                let d = if i == j { shift } else { T::zero() };
                T::from(src) - d
            })
            .collect()
    };
    let factor = |transpose: bool| -> Result<Lu<T>> {
        // An exactly singular shift is nudged by a few ulps of ‖X‖.
        match Lu::factor(shifted(mu, transpose), n) {
            Err(Error::Singular) => Lu::factor(shifted(mu + T::from(8.0 * f64::EPSILON * scale), transpose), n),
            other => other,
        }
    };
    let iterate = |lu: &Lu<T>| -> Vec<T> {
        let mut v = start_vector::<T>(n);
        for _ in 0..INVERSE_ITERATIONS {
            lu.solve_in_place(&mut v);
            let s = norm(&v);
            for x in v.iter_mut() {
                *x = *x * (1.0 / s);
            }
        }
        v
    };
    let right = iterate(&factor(false)?);
    let left = iterate(&factor(true)?);
    let mut dot = T::zero();
    for (l, r) in left.iter().zip(&right) {
        dot = dot + *l * *r;
    }
    let cond = 1.0 / dot.magnitude();
    if !right.iter().all(|x| x.magnitude().is_finite()) {
        return Err(Error::Singular);
    }
    Ok((right, cond))
}

/// `‖Av − λv‖` for unit `v`.
fn residual_real(a: &RealMatrix, v: &[f64], lambda: f64) -> f64 {
    let av = a.mul_vec(v);
    av.iter().zip(v).map(|(p, q)| (p - lambda * q) * (p - lambda * q)).sum::<f64>().sqrt()
}

fn check_eigenpair(residual: f64, cond: f64, scale: f64) -> Result<()> {
    if !(residual <= EIGENVALUE_RESIDUAL_TOL * scale) {
        return Err(Error::NotAnEigenvalue { residual: residual / scale.max(f64::MIN_POSITIVE) });
    }
    if !(cond <= DEFECTIVE_CONDITION) {
        return Err(Error::Defective);
    }
    Ok(())
}

fn validate_input(x: &RealMatrix) -> Result<f64> {
    if x.n() < 2 {
        return Err(Error::Config("partial Schur decomposition needs n >= 2"));
    }
    if !x.is_finite() {
        return Err(Error::Domain("matrix entries must be finite"));
    }
    Ok(x.frobenius_norm().max(f64::MIN_POSITIVE))
}

/// Deflates the real eigenvalues `λ1`, `λ2` of `x` into the leading 2×2
/// corner.
pub fn partial_schur_real_pair(x: &RealMatrix, lambda1: f64, lambda2: f64) -> Result<RealPairDecomposition> {
    let scale = validate_input(x)?;
    let n = x.n();

    let (v1, cond1) = eigenvector(x.as_slice(), n, lambda1, scale)?;
    let res1 = residual_real(x, &v1, lambda1);
    check_eigenpair(res1, cond1, scale)?;
    let h1 = reflector_for(n, 0, &v1);
    let a1 = h1.matmul(x).matmul(&h1);

    let trailing = a1.block(1, n - 1);
    let (v2, cond2) = eigenvector(trailing.as_slice(), n - 1, lambda2, scale)?;
    let res2 = residual_real(&trailing, &v2, lambda2);
    check_eigenpair(res2, cond2, scale)?;
    let h2 = reflector_for(n, 1, &v2);

    let o = h1.matmul(&h2);
    let mut m = o.transpose().matmul(x).matmul(&o);
    m[(1, 0)] = 0.0;
    for i in 2..n {
        m[(i, 0)] = 0.0;
        m[(i, 1)] = 0.0;
    }
    let (t1, y1) = split_tail(&m);
    Ok(RealPairDecomposition { x1: m[(0, 0)], x2: m[(1, 1)], t12: m[(0, 1)], t1, y1, o })
}

/// Deflates the conjugate pair `x ± iy` of `mat` into a standardized 2×2
/// corner.
pub fn partial_schur_complex_pair(mat: &RealMatrix, x: f64, y: f64) -> Result<ComplexPairDecomposition> {
    if !(y > 0.0) {
        return Err(Error::Domain("imaginary part must be positive"));
    }
    let scale = validate_input(mat)?;
    let n = mat.n();
    let z = Complex64::new(x, y);

    let (v, cond) = eigenvector(mat.as_slice(), n, z, scale)?;
    let vc: Vec<Complex64> = v.clone();
    let av: Vec<Complex64> = (0..n)
        .map(|i| mat.row(i).iter().zip(&vc).map(|(a, w)| w * *a).sum())
        .collect();
    let res = av.iter().zip(&vc).map(|(p, q)| (p - z * q).norm_sqr()).sum::<f64>().sqrt();
    check_eigenpair(res, cond, scale)?;
    let rq: Complex64 = av.iter().zip(&vc).map(|(p, q)| q.conj() * p).sum();

    // Orthonormal basis of span{Re v, Im v} via two reflections. For n = 2
    // that plane is the whole space and the rotation alone suffices.
    let mut o = if n == 2 {
        RealMatrix::identity(2)
    } else {
        let re: Vec<f64> = v.iter().map(|w| w.re).collect();
        let im: Vec<f64> = v.iter().map(|w| w.im).collect();
        let h1 = reflector_for(n, 0, &re);
        let im1 = h1.mul_vec(&im);
        let h2 = reflector_for(n, 1, &im1[1..]);
        h1.matmul(&h2)
    };

    // Standardize the corner by an in-plane rotation.
    let a = o.transpose().matmul(mat).matmul(&o);
    let s = standardize_2x2(a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
    if s.c == 0.0 {
        return Err(Error::NotAnEigenvalue { residual: res / scale });
    }
    rotate_columns(&mut o, s.cs, s.sn);
    if s.b < 0.0 {
        // Conjugating by diag(1, −1) flips the off-diagonal signs.
        for i in 0..n {
            o[(i, 1)] = -o[(i, 1)];
        }
    }
    if s.b.abs() < s.c.abs() {
        // A quarter turn swaps the roles of b and c.
        for i in 0..n {
            let (p, q) = (o[(i, 0)], o[(i, 1)]);
            o[(i, 0)] = q;
            o[(i, 1)] = -p;
        }
    }

    let mut m = o.transpose().matmul(mat).matmul(&o);
    for i in 2..n {
        m[(i, 0)] = 0.0;
        m[(i, 1)] = 0.0;
    }
    let (t2, y2) = split_tail(&m);
    let (b, c) = (m[(0, 1)], -m[(1, 0)]);
    // The rotation equalizes the diagonal up to rounding; `y` comes from the
    // Rayleigh quotient so that `y² = b·c` is a genuine check.
    let x = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    Ok(ComplexPairDecomposition { o, x, y: rq.im.abs(), b, c, eta: b - c, t2, y2 })
}

/// `O ← O·[[cs, −sn], [sn, cs]]` on the first two columns.
fn rotate_columns(o: &mut RealMatrix, cs: f64, sn: f64) {
    for i in 0..o.n() {
        let (p, q) = (o[(i, 0)], o[(i, 1)]);
        o[(i, 0)] = cs * p + sn * q;
        o[(i, 1)] = -sn * p + cs * q;
    }
}

/// `det(x·I − y)` by real LU.
pub fn real_shifted_determinant(y: &RealMatrix, x: f64) -> f64 {
    let n = y.n();
    RealMatrix::from_fn(n, |i, j| if i == j { x - y[(i, j)] } else { -y[(i, j)] }).determinant()
}

/// `|x1 − x2|·|det(x1 − Y1)·det(x2 − Y1)|`; an empty `Y1` has determinant 1.
pub fn jacobian_real_pair(x1: f64, x2: f64, y1: &RealMatrix) -> f64 {
    (x1 - x2).abs() * (real_shifted_determinant(y1, x1) * real_shifted_determinant(y1, x2)).abs()
}

/// `2|ηy|/√(η² + 4y²)·|det((x + iy) − Y2)|²`, defined as 0 at `η = y = 0`.
pub fn jacobian_complex_pair(x: f64, y: f64, eta: f64, y2: &RealMatrix) -> f64 {
    let denom = (eta * eta + 4.0 * y * y).sqrt();
    if denom == 0.0 || eta == 0.0 || y == 0.0 {
        return 0.0;
    }
    let prefactor = 2.0 * (eta * y).abs() / denom;
    prefactor * y2.shifted_determinant(Complex64::new(x, y)).norm_sqr()
}
