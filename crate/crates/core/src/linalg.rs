//! Dense row-major matrices plus the two factorizations the estimators need:
//! Householder QR for least squares and Cholesky for covariance matrices.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Serialized as a list of rows.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", into = "Vec<Vec<T>>", try_from = "Vec<Vec<T>>")]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds from row vectors; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::MismatchedShapes("ragged rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::MismatchedShapes(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::MismatchedShapes(format!(
                "{:?} x {:?}",
                self.shape(),
                rhs.shape()
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(
            T::zero(),
            |acc, &x| if x.abs() > acc { x.abs() } else { acc },
        )
    }

    /// Symmetric within `tol` relative to the largest entry (absolute below 1).
    pub fn is_symmetric(&self, tol: T) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let scale = self.max_abs().max(T::one());
        for i in 0..self.rows {
            for j in 0..i {
                if (self[(i, j)] - self[(j, i)]).abs() > tol * scale {
                    return false;
                }
            }
        }
        true
    }

    pub fn cast<U: Scalar>(&self) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| U::lit(x.as_f64())).collect(),
        }
    }
}

impl<T: Scalar> From<Matrix<T>> for Vec<Vec<T>> {
    fn from(m: Matrix<T>) -> Self {
        m.to_rows()
    }
}

impl<T: Scalar> TryFrom<Vec<Vec<T>>> for Matrix<T> {
    type Error = Error;

    fn try_from(rows: Vec<Vec<T>>) -> Result<Self> {
        Matrix::from_rows(&rows)
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        Ok(())
    }
}

/// Lower-triangular `L` with `L Lᵀ = a` and a strictly positive diagonal.
pub fn cholesky<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>> {
    if !a.is_symmetric(T::tolerance()) {
        return Err(Error::NotSymmetric);
    }
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d = d - l[(j, k)] * l[(j, k)];
        }
        if !(d > T::zero()) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite);
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s = s - l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Solves `a x = b` for symmetric positive definite `a`.
pub fn solve_spd<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    let l = cholesky(a)?;
    Ok(cholesky_solve(&l, b))
}

pub(crate) fn cholesky_solve<T: Scalar>(l: &Matrix<T>, b: &[T]) -> Vec<T> {
    let n = l.rows();
    let mut z = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            z[i] = z[i] - l[(i, k)] * z[k];
        }
        z[i] = z[i] / l[(i, i)];
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            z[i] = z[i] - l[(k, i)] * z[k];
        }
        z[i] = z[i] / l[(i, i)];
    }
    z
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_symmetric_eigenvalue<T: Scalar>(a: &Matrix<T>) -> f64 {
    let n = a.rows();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| a[(i, j)].as_f64());
    m.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Largest eigenvalue modulus of a square matrix.
pub fn spectral_radius<T: Scalar>(a: &Matrix<T>) -> f64 {
    let n = a.rows();
    if n == 0 {
        return 0.0;
    }
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| a[(i, j)].as_f64());
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Householder QR of a tall design matrix, kept for repeated solves against
/// several responses sharing the same regressors.
#[derive(Clone, Debug)]
pub struct Qr<T> {
    rows: usize,
    cols: usize,
    /// Upper-triangular factor, `cols x cols`.
    r: Matrix<T>,
    reflectors: Vec<(Vec<T>, T)>,
}

impl<T: Scalar> Qr<T> {
    /// Fails with `RankDeficientDesign` when a column is numerically spanned
    /// by the ones before it.
    pub fn new(x: &Matrix<T>) -> Result<Self> {
        let (m, n) = x.shape();
        if m < n {
            return Err(Error::InsufficientSample { needed: n, got: m });
        }
        let col_norms: Vec<T> = (0..n)
            .map(|j| (0..m).map(|i| x[(i, j)] * x[(i, j)]).sum::<T>().sqrt())
            .collect();
        let mut a = x.clone();
        let mut reflectors = Vec::with_capacity(n);
        for j in 0..n {
            let norm = (j..m).map(|i| a[(i, j)] * a[(i, j)]).sum::<T>().sqrt();
            if norm <= T::tolerance() * col_norms[j].max(T::min_positive_value()) {
                return Err(Error::RankDeficientDesign);
            }
            let x0 = a[(j, j)];
            let alpha = if x0 > T::zero() { -norm } else { norm };
            let mut v: Vec<T> = (j..m).map(|i| a[(i, j)]).collect();
            v[0] = v[0] - alpha;
            let vtv: T = v.iter().map(|&e| e * e).sum();
            let beta = if vtv > T::zero() {
                T::lit(2.0) / vtv
            } else {
                T::zero()
            };
            for c in j..n {
                let dot: T = v
                    .iter()
                    .enumerate()
                    .map(|(o, &vi)| vi * a[(j + o, c)])
                    .sum();
                let s = beta * dot;
                for (o, &vi) in v.iter().enumerate() {
                    a[(j + o, c)] = a[(j + o, c)] - s * vi;
                }
            }
            reflectors.push((v, beta));
        }
        let r = Matrix::from_fn(n, n, |i, j| if j >= i { a[(i, j)] } else { T::zero() });
        Ok(Self {
            rows: m,
            cols: n,
            r,
            reflectors,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn apply_qt(&self, y: &mut [T]) {
        for (j, (v, beta)) in self.reflectors.iter().enumerate() {
            let dot: T = v.iter().enumerate().map(|(o, &vi)| vi * y[j + o]).sum();
            let s = *beta * dot;
            for (o, &vi) in v.iter().enumerate() {
                y[j + o] = y[j + o] - s * vi;
            }
        }
    }

    /// Least-squares coefficients for one response column.
    pub fn solve(&self, y: &[T]) -> Vec<T> {
        assert_eq!(y.len(), self.rows, "response length must match design rows");
        let mut qty = y.to_vec();
        self.apply_qt(&mut qty);
        let n = self.cols;
        let mut b = vec![T::zero(); n];
        for i in (0..n).rev() {
            let mut s = qty[i];
            for k in (i + 1)..n {
                s = s - self.r[(i, k)] * b[k];
            }
            b[i] = s / self.r[(i, i)];
        }
        b
    }

    /// `(XᵀX)⁻¹` assembled from the triangular factor.
    pub fn unscaled_covariance(&self) -> Matrix<T> {
        let n = self.cols;
        let mut rinv = Matrix::zeros(n, n);
        for c in 0..n {
            for i in (0..=c).rev() {
                let mut s = if i == c { T::one() } else { T::zero() };
                for k in (i + 1)..=c {
                    s = s - self.r[(i, k)] * rinv[(k, c)];
                }
                rinv[(i, c)] = s / self.r[(i, i)];
            }
        }
        Matrix::from_fn(n, n, |i, j| {
            (i.max(j)..n).map(|k| rinv[(i, k)] * rinv[(j, k)]).sum()
        })
    }
}
