//! Ordinary least squares on a fixed design, reused across several responses.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Qr};
use crate::scalar::Scalar;

/// A factored design matrix.
#[derive(Clone, Debug)]
pub struct OlsDesign<T> {
    x: Matrix<T>,
    qr: Qr<T>,
    xtx_inv: Matrix<T>,
}

#[derive(Clone, Debug)]
pub struct OlsFit<T> {
    pub coefficients: Vec<T>,
    pub std_errors: Vec<T>,
    pub residuals: Vec<T>,
    pub ssr: T,
    /// `SSR / (n - m)`.
    pub sigma2: T,
    pub df_resid: usize,
}

impl<T: Scalar> OlsFit<T> {
    pub fn t_statistics(&self) -> Vec<T> {
        self.coefficients
            .iter()
            .zip(&self.std_errors)
            .map(|(&b, &se)| b / se)
            .collect()
    }
}

impl<T: Scalar> OlsDesign<T> {
    /// Needs more rows than columns and a full column rank.
    pub fn new(x: Matrix<T>) -> Result<Self> {
        if x.rows() <= x.cols() {
            return Err(Error::InsufficientSample {
                needed: x.cols() + 1,
                got: x.rows(),
            });
        }
        let qr = Qr::new(&x)?;
        let xtx_inv = qr.unscaled_covariance();
        Ok(Self { x, qr, xtx_inv })
    }

    pub fn x(&self) -> &Matrix<T> {
        &self.x
    }

    pub fn nobs(&self) -> usize {
        self.x.rows()
    }

    pub fn ncols(&self) -> usize {
        self.x.cols()
    }

    /// `(XᵀX)⁻¹`.
    pub fn xtx_inv(&self) -> &Matrix<T> {
        &self.xtx_inv
    }

    pub fn fit(&self, y: &[T]) -> OlsFit<T> {
        let coefficients = self.qr.solve(y);
        let fitted = self.x.mul_vec(&coefficients);
        let residuals: Vec<T> = y.iter().zip(&fitted).map(|(&a, &f)| a - f).collect();
        let ssr: T = residuals.iter().map(|&e| e * e).sum();
        let df_resid = self.nobs() - self.ncols();
        let sigma2 = ssr / T::from_usize_lossy(df_resid);
        let std_errors = (0..self.ncols())
            .map(|j| (sigma2 * self.xtx_inv[(j, j)]).sqrt())
            .collect();
        OlsFit {
            coefficients,
            std_errors,
            residuals,
            ssr,
            sigma2,
            df_resid,
        }
    }
}
