use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::spec::VarSpec;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::market_data::{AlignedPanel, Variable};
use crate::regression::OlsDesign;
use crate::scalar::Scalar;

/// Response and regressor matrices of a VAR on the effective sample.
#[derive(Clone, Debug)]
pub struct VarDesign<T> {
    /// `T_eff x k`, columns in spec order.
    pub response: Matrix<T>,
    /// `T_eff x m`, columns `[1, v1 lags 1..p, v2 lags 1..p, ...]`.
    pub regressors: Matrix<T>,
    pub dates: Vec<NaiveDate>,
}

fn windowed<T: Scalar>(panel: &AlignedPanel<T>, spec: &VarSpec) -> AlignedPanel<T> {
    match spec.sample_window {
        Some((s, e)) => panel.window(Some(s), Some(e)),
        None => panel.clone(),
    }
}

/// Builds the stacked lag design. Needs more effective rows than regressors.
pub fn build_design<T: Scalar>(panel: &AlignedPanel<T>, spec: &VarSpec) -> Result<VarDesign<T>> {
    spec.validate()?;
    let panel = windowed(panel, spec);
    let cols = spec
        .variables
        .iter()
        .map(|&v| panel.position(v))
        .collect::<Result<Vec<_>>>()?;
    let p = spec.lag_order;
    let m = spec.n_regressors();
    let n = panel.len();
    if n < p + m + 1 {
        return Err(Error::InsufficientSample {
            needed: p + m + 1,
            got: n,
        });
    }
    let t_eff = n - p;
    let vals = panel.values();
    let icpt = usize::from(spec.include_intercept);
    let response = Matrix::from_fn(t_eff, cols.len(), |r, c| vals[(r + p, cols[c])]);
    let regressors = Matrix::from_fn(t_eff, m, |r, j| {
        if j < icpt {
            return T::one();
        }
        let block = (j - icpt) / p;
        let lag = (j - icpt) % p + 1;
        vals[(r + p - lag, cols[block])]
    });
    Ok(VarDesign {
        response,
        regressors,
        dates: panel.dates()[p..].to_vec(),
    })
}

/// Per-equation summary statistics in the usual regression-output layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct EquationStats<T> {
    pub r_squared: T,
    pub adj_r_squared: T,
    pub f_statistic: T,
    pub log_likelihood: T,
    pub aic: T,
    pub sc: T,
    pub mean_dependent: T,
    pub sd_dependent: T,
    pub ssr: T,
}

impl<T: Scalar> EquationStats<T> {
    /// `(label, value)` pairs of the eight reported statistics.
    pub fn labelled(&self) -> [(&'static str, T); 8] {
        [
            ("R-squared", self.r_squared),
            ("Adj. R-squared", self.adj_r_squared),
            ("F-statistic", self.f_statistic),
            ("Log likelihood", self.log_likelihood),
            ("Akaike AIC", self.aic),
            ("Schwarz SC", self.sc),
            ("Mean dependent", self.mean_dependent),
            ("S.D. dependent", self.sd_dependent),
        ]
    }

    fn compute(y: &[T], ssr: T, m: usize, intercept: bool) -> Self {
        let n = y.len();
        let nf = T::from_usize_lossy(n);
        let mf = T::from_usize_lossy(m);
        let mean = y.iter().copied().sum::<T>() / nf;
        let centered: T = y.iter().map(|&v| (v - mean) * (v - mean)).sum();
        let sst = if intercept {
            centered
        } else {
            y.iter().map(|&v| v * v).sum()
        };
        let r2 = T::one() - ssr / sst;
        let df_model = if intercept { m - 1 } else { m };
        let df_resid = T::from_usize_lossy(n - m);
        let adj = T::one()
            - (T::one() - r2) * (nf - T::from_usize_lossy(usize::from(intercept))) / df_resid;
        let f = if df_model == 0 {
            T::nan()
        } else {
            ((sst - ssr) / T::from_usize_lossy(df_model)) / (ssr / df_resid)
        };
        let two_pi = T::lit(2.0 * std::f64::consts::PI);
        let ll = -nf / T::lit(2.0) * (T::one() + two_pi.ln() + (ssr / nf).ln());
        let two = T::lit(2.0);
        Self {
            r_squared: r2,
            adj_r_squared: adj,
            f_statistic: f,
            log_likelihood: ll,
            aic: -two * ll / nf + two * mf / nf,
            sc: -two * ll / nf + mf * nf.ln() / nf,
            mean_dependent: mean,
            sd_dependent: (centered / (nf - T::one())).sqrt(),
            ssr,
        }
    }
}

/// Estimated VAR system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct VarFit<T> {
    pub entity_id: String,
    pub spec: VarSpec,
    /// Dates of the effective sample.
    pub dates: Vec<NaiveDate>,
    /// `k x m`, one row per equation.
    pub coefficients: Matrix<T>,
    pub std_errors: Matrix<T>,
    pub t_statistics: Matrix<T>,
    /// `T_eff x k`.
    pub residuals: Matrix<T>,
    pub equations: Vec<EquationStats<T>>,
    /// `E'E / T_eff`.
    pub residual_covariance: Matrix<T>,
    /// `(X'X)^-1` of the shared design.
    pub xtx_inv: Matrix<T>,
}

/// Equation-by-equation least squares on the shared lag design.
///
/// t-statistics use `T_eff - m` degrees of freedom; the residual covariance
/// divides by `T_eff`; `AIC = -2l/T + 2m/T`, `SC = -2l/T + m ln(T)/T`.
pub fn fit_var<T: Scalar>(panel: &AlignedPanel<T>, spec: &VarSpec) -> Result<VarFit<T>> {
    let design = build_design(panel, spec)?;
    let ols = OlsDesign::new(design.regressors)?;
    let k = spec.k();
    let m = spec.n_regressors();
    let t_eff = ols.nobs();
    let mut coefficients = Matrix::zeros(k, m);
    let mut std_errors = Matrix::zeros(k, m);
    let mut t_statistics = Matrix::zeros(k, m);
    let mut residuals = Matrix::zeros(t_eff, k);
    let mut equations = Vec::with_capacity(k);
    for eq in 0..k {
        let y = design.response.column(eq);
        let fit = ols.fit(&y);
        for j in 0..m {
            coefficients[(eq, j)] = fit.coefficients[j];
            std_errors[(eq, j)] = fit.std_errors[j];
            t_statistics[(eq, j)] = fit.coefficients[j] / fit.std_errors[j];
        }
        for (r, &e) in fit.residuals.iter().enumerate() {
            residuals[(r, eq)] = e;
        }
        equations.push(EquationStats::compute(
            &y,
            fit.ssr,
            m,
            spec.include_intercept,
        ));
    }
    let tf = T::from_usize_lossy(t_eff);
    let residual_covariance = Matrix::from_fn(k, k, |i, j| {
        (0..t_eff)
            .map(|r| residuals[(r, i)] * residuals[(r, j)])
            .sum::<T>()
            / tf
    });
    Ok(VarFit {
        entity_id: panel.entity_id().to_string(),
        spec: spec.clone(),
        dates: design.dates,
        coefficients,
        std_errors,
        t_statistics,
        residuals,
        equations,
        residual_covariance,
        xtx_inv: ols.xtx_inv().clone(),
    })
}

impl<T: Scalar> VarFit<T> {
    pub fn k(&self) -> usize {
        self.spec.k()
    }

    pub fn t_eff(&self) -> usize {
        self.residuals.rows()
    }

    pub fn n_regressors(&self) -> usize {
        self.spec.n_regressors()
    }

    pub fn df_resid(&self) -> usize {
        self.t_eff() - self.n_regressors()
    }

    pub fn equation_index(&self, v: Variable) -> Result<usize> {
        self.spec
            .variables
            .iter()
            .position(|&x| x == v)
            .ok_or_else(|| Error::UnknownVariable(v.name().into()))
    }

    /// Coefficient of `regressor` at `lag` in the equation of `equation`.
    pub fn coefficient(&self, equation: Variable, regressor: Variable, lag: usize) -> Result<T> {
        let i = self.equation_index(equation)?;
        Ok(self.coefficients[(i, self.spec.regressor_index(regressor, lag)?)])
    }

    pub fn intercepts(&self) -> Vec<T> {
        if self.spec.include_intercept {
            self.coefficients.column(0)
        } else {
            vec![T::zero(); self.k()]
        }
    }

    /// `A_lag` with `A[i][l]` the effect of variable `l` at `lag` on equation `i`.
    pub fn lag_matrix(&self, lag: usize) -> Matrix<T> {
        let k = self.k();
        let icpt = usize::from(self.spec.include_intercept);
        let p = self.spec.lag_order;
        Matrix::from_fn(k, k, |i, l| self.coefficients[(i, icpt + l * p + lag - 1)])
    }

    /// `kp x kp` companion matrix.
    pub fn companion(&self) -> Matrix<T> {
        let lags: Vec<Matrix<T>> = (1..=self.spec.lag_order)
            .map(|j| self.lag_matrix(j))
            .collect();
        companion_matrix(&lags)
    }

    /// Document mirroring the coefficient tables: rows `RS(-1)` .. `Const`
    /// per equation plus a footer of summary statistics.
    pub fn to_table_json(&self) -> Value {
        let labels = self.spec.regressor_labels();
        let icpt = usize::from(self.spec.include_intercept);
        // lag rows first, Const last
        let order: Vec<usize> = (icpt..labels.len()).chain(0..icpt).collect();
        let mut equations = Map::new();
        for (eq, v) in self.spec.variables.iter().enumerate() {
            let mut rows = Map::new();
            for &j in &order {
                rows.insert(
                    labels[j].clone(),
                    json!({
                        "coefficient": self.coefficients[(eq, j)],
                        "std_error": self.std_errors[(eq, j)],
                        "t": self.t_statistics[(eq, j)],
                    }),
                );
            }
            let footer: Map<String, Value> = self.equations[eq]
                .labelled()
                .iter()
                .map(|(l, x)| (l.to_string(), json!(x)))
                .collect();
            equations.insert(
                v.name().to_string(),
                json!({ "rows": rows, "footer": footer }),
            );
        }
        json!({
            "entity_id": self.entity_id,
            "variables": self.spec.variables,
            "lag_order": self.spec.lag_order,
            "t_eff": self.t_eff(),
            "sample": {
                "start": self.dates.first().map(|d| d.to_string()),
                "end": self.dates.last().map(|d| d.to_string()),
            },
            "conventions": conventions(),
            "equations": equations,
        })
    }
}

/// Estimator conventions recorded alongside every fit.
pub fn conventions() -> Value {
    json!({
        "aic": "-2*loglik/T_eff + 2*m/T_eff",
        "sc": "-2*loglik/T_eff + m*ln(T_eff)/T_eff",
        "loglik": "Gaussian, per equation, sigma^2 = SSR/T_eff",
        "t_statistic_dof": "T_eff - m",
        "residual_covariance_divisor": "T_eff",
        "f_statistic": "all slopes zero",
    })
}

pub(crate) fn companion_matrix<T: Scalar>(lags: &[Matrix<T>]) -> Matrix<T> {
    let p = lags.len();
    let k = lags.first().map_or(0, Matrix::rows);
    Matrix::from_fn(k * p, k * p, |r, c| {
        if r < k {
            lags[c / k][(r, c % k)]
        } else if c == r - k {
            T::one()
        } else {
            T::zero()
        }
    })
}
