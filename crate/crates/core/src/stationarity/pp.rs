use super::long_run::{bartlett_long_run_variance, newey_west_bandwidth};
use super::{check_length, critical, Deterministic, Nuisance, TestKind, UnitRootReport};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::regression::OlsDesign;
use crate::scalar::Scalar;

/// Phillips-Perron `Z_tau`.
///
/// Fits `y_t = rho y_{t-1} + deterministic + u_t` and corrects the t-ratio of
/// `rho - 1` with a Bartlett long-run variance of `u`:
/// `Z = sqrt(g0/l2) t - (l2 - g0) n se(rho) / (2 sqrt(l2) s)`.
pub fn pp_test<T: Scalar>(
    series: &[T],
    deterministic: Deterministic,
    bandwidth: Option<usize>,
) -> Result<UnitRootReport<T>> {
    check_length(series.len())?;
    let n = series.len() - 1;
    let m = 1 + deterministic.terms();
    let x = Matrix::from_fn(n, m, |t, j| match j {
        0 => series[t],
        1 => T::one(),
        _ => T::from_usize_lossy(t + 1),
    });
    let ols = OlsDesign::new(x).map_err(|e| match e {
        Error::RankDeficientDesign => {
            Error::DegenerateRegression("collinear Phillips-Perron design".into())
        }
        other => other,
    })?;
    let fit = ols.fit(&series[1..]);
    let u = &fit.residuals;
    let bw = bandwidth.unwrap_or_else(|| newey_west_bandwidth(u));
    let nf = T::from_usize_lossy(n);
    let gamma0 = fit.ssr / nf;
    let lrv = bartlett_long_run_variance(u, bw);
    if !(lrv > T::zero()) || !(fit.sigma2 > T::zero()) {
        return Err(Error::NonPositiveLongRunVariance);
    }
    let se = fit.std_errors[0];
    let s = fit.sigma2.sqrt();
    let t_rho = (fit.coefficients[0] - T::one()) / se;
    let lam = lrv.sqrt();
    let stat = (gamma0 / lrv).sqrt() * t_rho - (lrv - gamma0) * nf * se / (T::lit(2.0) * lam * s);
    Ok(UnitRootReport::new(
        TestKind::PhillipsPerron,
        stat,
        critical::dickey_fuller(deterministic, n),
        Nuisance {
            lags: bw,
            deterministic,
        },
        n,
    ))
}
