//! Descriptive statistics: Pearson correlation matrix and sample autocorrelations.

use super::panel::AlignedPanel;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{mean, Scalar};

fn centered<T: Scalar>(xs: &[T]) -> Vec<T> {
    let m = mean(xs);
    xs.iter().map(|&x| x - m).collect()
}

/// Pearson correlations between the panel columns.
pub fn correlation_matrix<T: Scalar>(panel: &AlignedPanel<T>) -> Result<Matrix<T>> {
    if panel.len() < 3 {
        return Err(Error::TooShort {
            needed: 3,
            got: panel.len(),
        });
    }
    let k = panel.k();
    let cols: Vec<Vec<T>> = (0..k)
        .map(|j| centered(&panel.values().column(j)))
        .collect();
    let norms: Vec<T> = cols
        .iter()
        .map(|c| c.iter().map(|&x| x * x).sum::<T>().sqrt())
        .collect();
    if let Some(j) = norms.iter().position(|&n| !(n > T::zero())) {
        return Err(Error::ZeroVariance(panel.columns()[j].name().into()));
    }
    let mut out = Matrix::identity(k);
    for i in 0..k {
        for j in 0..i {
            let dot: T = cols[i].iter().zip(&cols[j]).map(|(&a, &b)| a * b).sum();
            let r = (dot / (norms[i] * norms[j])).max(-T::one()).min(T::one());
            out[(i, j)] = r;
            out[(j, i)] = r;
        }
    }
    Ok(out)
}

/// Sample autocorrelations at lags `1..=max_lag`, each normalized by the
/// full-sample variance.
pub fn autocorrelation<T: Scalar>(series: &[T], max_lag: usize) -> Result<Vec<T>> {
    if series.len() <= max_lag + 1 {
        return Err(Error::TooShort {
            needed: max_lag + 2,
            got: series.len(),
        });
    }
    let c = centered(series);
    let denom: T = c.iter().map(|&x| x * x).sum();
    if !(denom > T::zero()) {
        return Err(Error::ZeroVariance("autocorrelation input".into()));
    }
    Ok((1..=max_lag)
        .map(|lag| {
            let num: T = c[lag..]
                .iter()
                .zip(&c[..c.len() - lag])
                .map(|(&a, &b)| a * b)
                .sum();
            num / denom
        })
        .collect())
}

/// Element-wise mean of equally shaped matrices.
pub fn mean_matrix<T: Scalar>(ms: &[Matrix<T>]) -> Result<Matrix<T>> {
    let first = ms.first().ok_or(Error::EmptyList)?;
    if ms.iter().any(|m| m.shape() != first.shape()) {
        return Err(Error::MismatchedShapes("matrices to average".into()));
    }
    let n = T::from_usize_lossy(ms.len());
    Ok(Matrix::from_fn(first.rows(), first.cols(), |i, j| {
        ms.iter().map(|m| m[(i, j)]).sum::<T>() / n
    }))
}
