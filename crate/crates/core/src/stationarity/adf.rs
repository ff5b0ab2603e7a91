use serde::{Deserialize, Serialize};

use super::{check_length, critical, Deterministic, Nuisance, TestKind, UnitRootReport};
use crate::error::{Error, Result};
use crate::linalg::{solve_spd, Matrix};
use crate::regression::OlsDesign;
use crate::scalar::Scalar;

/// Augmentation lag policy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdfLags {
    /// Minimize the Schwarz criterion over `0..=max` on a common sample.
    Schwarz {
        max: usize,
    },
    Fixed(usize),
}

/// Schwert's rule `floor(12 (n/100)^(1/4))`.
pub fn max_lag_schwert(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

/// ADF test. `lag = None` selects the lag by Schwarz criterion up to
/// Schwert's maximum; `Some(l)` fixes it.
pub fn adf_test<T: Scalar>(
    series: &[T],
    deterministic: Deterministic,
    lag: Option<usize>,
) -> Result<UnitRootReport<T>> {
    let policy = match lag {
        Some(l) => AdfLags::Fixed(l),
        None => AdfLags::Schwarz {
            max: max_lag_schwert(series.len()),
        },
    };
    adf_test_with(series, deterministic, policy)
}

/// Regressor row for `dy[t]`: lagged level, deterministic terms, lagged differences.
fn fill_row<T: Scalar>(
    y: &[T],
    dy: &[T],
    t: usize,
    lags: usize,
    det: Deterministic,
    row: &mut Vec<T>,
) {
    row.clear();
    row.push(y[t]);
    row.push(T::one());
    if det == Deterministic::ConstantAndTrend {
        row.push(T::from_usize_lossy(t + 1));
    }
    for j in 1..=lags {
        row.push(dy[t - j]);
    }
}

fn design<T: Scalar>(
    y: &[T],
    dy: &[T],
    lags: usize,
    first: usize,
    det: Deterministic,
) -> (Matrix<T>, Vec<T>) {
    let n = dy.len();
    let m = 1 + det.terms() + lags;
    let mut data = Vec::with_capacity((n - first) * m);
    let mut row = Vec::with_capacity(m);
    for t in first..n {
        fill_row(y, dy, t, lags, det, &mut row);
        data.extend_from_slice(&row);
    }
    let x = Matrix::from_row_major(n - first, m, data).expect("consistent design");
    (x, dy[first..].to_vec())
}

fn select_lag<T: Scalar>(y: &[T], dy: &[T], max: usize, det: Deterministic) -> Result<usize> {
    if max == 0 {
        return Ok(0);
    }
    let (x, resp) = design(y, dy, max, max, det);
    let nobs = x.rows();
    let m = x.cols();
    // cross products of [X | y] on the common sample
    let mut cross = Matrix::zeros(m + 1, m + 1);
    for r in 0..nobs {
        let row = x.row(r);
        for i in 0..=m {
            let a = if i < m { row[i] } else { resp[r] };
            for j in 0..=i {
                let b = if j < m { row[j] } else { resp[r] };
                cross[(i, j)] = cross[(i, j)] + a * b;
            }
        }
    }
    for i in 0..=m {
        for j in 0..i {
            cross[(j, i)] = cross[(i, j)];
        }
    }
    let yy = cross[(m, m)];
    let nf = T::from_usize_lossy(nobs);
    let base = 1 + det.terms();
    let mut best: Option<(T, usize)> = None;
    for l in 0..=max {
        let p = base + l;
        let a = Matrix::from_fn(p, p, |i, j| cross[(i, j)]);
        let b: Vec<T> = (0..p).map(|i| cross[(i, m)]).collect();
        let Ok(beta) = solve_spd(&a, &b) else {
            continue;
        };
        let ssr = yy - beta.iter().zip(&b).map(|(&u, &v)| u * v).sum::<T>();
        if !(ssr > T::zero()) {
            continue;
        }
        let bic = (ssr / nf).ln() + T::from_usize_lossy(p) * nf.ln() / nf;
        if best.is_none_or(|(v, _)| bic < v) {
            best = Some((bic, l));
        }
    }
    best.map(|(_, l)| l)
        .ok_or_else(|| Error::DegenerateRegression("no augmentation lag gives a usable fit".into()))
}

pub fn adf_test_with<T: Scalar>(
    series: &[T],
    deterministic: Deterministic,
    lags: AdfLags,
) -> Result<UnitRootReport<T>> {
    check_length(series.len())?;
    let n = series.len() - 1;
    let base = 1 + deterministic.terms();
    // keep at least half the differenced sample for estimation
    let cap = (n / 2).saturating_sub(base + 1);
    let dy: Vec<T> = series.windows(2).map(|w| w[1] - w[0]).collect();
    let lag = match lags {
        AdfLags::Fixed(l) => {
            if l > cap {
                return Err(Error::TooShort {
                    needed: 2 * (l + base + 1) + 1,
                    got: series.len(),
                });
            }
            l
        }
        AdfLags::Schwarz { max } => select_lag(series, &dy, max.min(cap), deterministic)?,
    };
    let (x, resp) = design(series, &dy, lag, lag, deterministic);
    let ols = OlsDesign::new(x).map_err(|e| match e {
        Error::RankDeficientDesign => Error::DegenerateRegression("collinear ADF design".into()),
        other => other,
    })?;
    let fit = ols.fit(&resp);
    if !(fit.std_errors[0] > T::zero()) {
        return Err(Error::DegenerateRegression("zero residual variance".into()));
    }
    let stat = fit.coefficients[0] / fit.std_errors[0];
    let nobs = ols.nobs();
    Ok(UnitRootReport::new(
        TestKind::Adf,
        stat,
        critical::dickey_fuller(deterministic, nobs),
        Nuisance {
            lags: lag,
            deterministic,
        },
        nobs,
    ))
}
