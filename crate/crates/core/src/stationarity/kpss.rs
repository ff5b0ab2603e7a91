use super::long_run::{bartlett_long_run_variance, newey_west_bandwidth};
use super::{check_length, critical, detrend, Deterministic, Nuisance, TestKind, UnitRootReport};
use crate::error::Result;
use crate::scalar::Scalar;

/// KPSS LM statistic `sum S_t^2 / (n^2 l2)` on partial sums of the
/// demeaned (or detrended) series. The null is stationarity.
pub fn kpss_test<T: Scalar>(
    series: &[T],
    deterministic: Deterministic,
    bandwidth: Option<usize>,
) -> Result<UnitRootReport<T>> {
    check_length(series.len())?;
    let n = series.len();
    let e = detrend(series, deterministic);
    let mut partial = T::zero();
    let mut sum_sq = T::zero();
    for &v in &e {
        partial = partial + v;
        sum_sq = sum_sq + partial * partial;
    }
    let bw = bandwidth.unwrap_or_else(|| newey_west_bandwidth(&e));
    let lrv = bartlett_long_run_variance(&e, bw);
    let nf = T::from_usize_lossy(n);
    // a constant series has identically zero partial sums
    let stat = if sum_sq > T::zero() && lrv > T::zero() {
        sum_sq / (nf * nf * lrv)
    } else {
        T::zero()
    };
    Ok(UnitRootReport::new(
        TestKind::Kpss,
        stat,
        critical::kpss(deterministic),
        Nuisance {
            lags: bw,
            deterministic,
        },
        n,
    ))
}
