//! Difference-VAR estimation and cross-entity pooling of the results.

mod fit;
mod spec;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::distributions::t_two_sided;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::market_data::AlignedPanel;
use crate::scalar::Scalar;

pub(crate) use fit::companion_matrix;
pub use fit::{build_design, conventions, fit_var, EquationStats, VarDesign, VarFit};
pub use spec::{VarSpec, DEFAULT_LAG_ORDER};

fn check_homogeneous<T: Scalar>(fits: &[VarFit<T>]) -> Result<&VarFit<T>> {
    let first = fits.first().ok_or(Error::EmptyList)?;
    if fits.iter().any(|f| !f.spec.same_shape(&first.spec)) {
        return Err(Error::HeterogeneousSpecs);
    }
    Ok(first)
}

/// Per `(equation, regressor)` cell, how many fits reject a zero coefficient
/// in a two-sided Student t test at `level`, with `T_eff - m` degrees of
/// freedom per fit.
pub fn significance_count<T: Scalar>(fits: &[VarFit<T>], level: f64) -> Result<Vec<Vec<usize>>> {
    let first = check_homogeneous(fits)?;
    let (k, m) = first.coefficients.shape();
    let mut counts = vec![vec![0usize; m]; k];
    for f in fits {
        let df = f.df_resid() as f64;
        for (i, row) in counts.iter_mut().enumerate() {
            for (j, c) in row.iter_mut().enumerate() {
                let t = f.t_statistics[(i, j)].as_f64();
                if t.is_finite() && t_two_sided(t, df) < level {
                    *c += 1;
                }
            }
        }
    }
    Ok(counts)
}

/// Element-wise means across entities of coefficients, t-statistics and
/// equation statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FitAggregate<T> {
    pub spec: VarSpec,
    pub n_fits: usize,
    pub mean_coefficients: Matrix<T>,
    pub mean_t_statistics: Matrix<T>,
    pub mean_equations: Vec<EquationStats<T>>,
}

pub fn aggregate_fits<T: Scalar>(fits: &[VarFit<T>]) -> Result<FitAggregate<T>> {
    let first = check_homogeneous(fits)?;
    let n = T::from_usize_lossy(fits.len());
    let (k, m) = first.coefficients.shape();
    let mean_of = |get: &dyn Fn(&VarFit<T>) -> &Matrix<T>| {
        Matrix::from_fn(k, m, |i, j| {
            fits.iter().map(|f| get(f)[(i, j)]).sum::<T>() / n
        })
    };
    let avg = |g: &dyn Fn(&EquationStats<T>) -> T, eq: usize| {
        fits.iter().map(|f| g(&f.equations[eq])).sum::<T>() / n
    };
    let mean_equations = (0..k)
        .map(|eq| EquationStats {
            r_squared: avg(&|e| e.r_squared, eq),
            adj_r_squared: avg(&|e| e.adj_r_squared, eq),
            f_statistic: avg(&|e| e.f_statistic, eq),
            log_likelihood: avg(&|e| e.log_likelihood, eq),
            aic: avg(&|e| e.aic, eq),
            sc: avg(&|e| e.sc, eq),
            mean_dependent: avg(&|e| e.mean_dependent, eq),
            sd_dependent: avg(&|e| e.sd_dependent, eq),
            ssr: avg(&|e| e.ssr, eq),
        })
        .collect();
    Ok(FitAggregate {
        spec: first.spec.clone(),
        n_fits: fits.len(),
        mean_coefficients: mean_of(&|f| &f.coefficients),
        mean_t_statistics: mean_of(&|f| &f.t_statistics),
        mean_equations,
    })
}

/// Half-open windows `[lo, hi)` cut at the breakpoints; open at both ends.
pub fn partition_windows(
    breakpoints: &[NaiveDate],
) -> Result<Vec<(Option<NaiveDate>, Option<NaiveDate>)>> {
    if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSpec(
            "breakpoints must be strictly increasing".into(),
        ));
    }
    let mut bounds: Vec<Option<NaiveDate>> = vec![None];
    bounds.extend(breakpoints.iter().copied().map(Some));
    bounds.push(None);
    Ok(bounds.windows(2).map(|w| (w[0], w[1])).collect())
}

/// Independent fits on each calendar window; an empty breakpoint list gives
/// a single fit on the whole (spec-windowed) sample.
pub fn subperiod_fits<T: Scalar>(
    panel: &AlignedPanel<T>,
    spec: &VarSpec,
    breakpoints: &[NaiveDate],
) -> Result<Vec<VarFit<T>>> {
    let base = match spec.sample_window {
        Some((s, e)) => panel.window(Some(s), Some(e)),
        None => panel.clone(),
    };
    let unwindowed = VarSpec {
        sample_window: None,
        ..spec.clone()
    };
    partition_windows(breakpoints)?
        .into_iter()
        .map(|(lo, hi)| fit_var(&base.window(lo, hi), &unwindowed))
        .collect()
}
