use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cholesky, Matrix};
use crate::market_data::Variable;
use crate::scalar::Scalar;
use crate::var::VarFit;

/// Response horizon used for the study's figures (trading days).
pub const DEFAULT_HORIZON: usize = 15;

/// Orthogonalized impulse responses.
///
/// `responses[h][(i, j)]` is the response of variable `i` at horizon `h` to
/// a one-standard-deviation shock in variable `j`, both indexed by `ordering`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct IrfResult<T> {
    pub horizon: usize,
    pub ordering: Vec<Variable>,
    pub responses: Vec<Matrix<T>>,
    /// Impact standard deviation of each orthogonal shock (Cholesky diagonal).
    pub shock_scale: Vec<T>,
}

impl<T: Scalar> IrfResult<T> {
    fn index(&self, v: Variable) -> Result<usize> {
        self.ordering
            .iter()
            .position(|&x| x == v)
            .ok_or_else(|| Error::UnknownVariable(v.name().into()))
    }

    /// Response path of `response` to a shock in `shock`, horizons `0..=H`.
    pub fn path(&self, response: Variable, shock: Variable) -> Result<Vec<T>> {
        let i = self.index(response)?;
        let j = self.index(shock)?;
        Ok(self.responses.iter().map(|m| m[(i, j)]).collect())
    }

    /// Long-format CSV `horizon,shock_var,response_var,value`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["horizon", "shock_var", "response_var", "value"])?;
        for (h, m) in self.responses.iter().enumerate() {
            for (j, shock) in self.ordering.iter().enumerate() {
                for (i, resp) in self.ordering.iter().enumerate() {
                    w.write_record([
                        h.to_string(),
                        shock.to_string(),
                        resp.to_string(),
                        m[(i, j)].to_string(),
                    ])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Moving-average matrices `Phi_0 = I`, `Phi_h = sum_{j=1}^{min(h,p)} A_j Phi_{h-j}`.
pub fn ma_coefficients<T: Scalar>(fit: &VarFit<T>, horizon: usize) -> Vec<Matrix<T>> {
    let k = fit.k();
    let lags: Vec<Matrix<T>> = (1..=fit.spec.lag_order)
        .map(|j| fit.lag_matrix(j))
        .collect();
    let mut phi = vec![Matrix::identity(k)];
    for h in 1..=horizon {
        let mut acc = Matrix::zeros(k, k);
        for (j, a) in lags.iter().enumerate().take(h) {
            let term = a.matmul(&phi[h - j - 1]).expect("square blocks");
            acc = Matrix::from_fn(k, k, |r, c| acc[(r, c)] + term[(r, c)]);
        }
        phi.push(acc);
    }
    phi
}

/// Cholesky-orthogonalized responses `Phi_h L` with the fit's variable order.
pub fn impulse_response<T: Scalar>(fit: &VarFit<T>, horizon: usize) -> Result<IrfResult<T>> {
    let l = cholesky(&fit.residual_covariance).map_err(|e| match e {
        Error::NotPositiveDefinite | Error::NotSymmetric => Error::SingularCovariance,
        other => other,
    })?;
    let responses = ma_coefficients(fit, horizon)
        .iter()
        .map(|phi| phi.matmul(&l).expect("square blocks"))
        .collect();
    Ok(IrfResult {
        horizon,
        ordering: fit.spec.variables.clone(),
        responses,
        shock_scale: (0..fit.k()).map(|i| l[(i, i)]).collect(),
    })
}

/// Normalized weights `cap_i / sum(caps)`.
pub fn cap_weights(caps: &[f64]) -> Result<Vec<f64>> {
    if caps.is_empty() {
        return Err(Error::EmptyList);
    }
    if caps.iter().any(|&c| !(c > 0.0) || !c.is_finite()) {
        return Err(Error::NonPositiveCap);
    }
    let total: f64 = caps.iter().sum();
    Ok(caps.iter().map(|c| c / total).collect())
}

/// Market-capitalization weighted mean of per-entity responses.
pub fn cap_weighted_irf<T: Scalar>(results: &[(IrfResult<T>, f64)]) -> Result<IrfResult<T>> {
    let (first, _) = results.first().ok_or(Error::EmptyList)?;
    for (r, _) in results {
        if r.horizon != first.horizon
            || r.ordering != first.ordering
            || r.responses.len() != first.responses.len()
        {
            return Err(Error::MismatchedShapes("impulse responses to pool".into()));
        }
    }
    let caps: Vec<f64> = results.iter().map(|(_, c)| *c).collect();
    let weights: Vec<T> = cap_weights(&caps)?.into_iter().map(T::lit).collect();
    let k = first.ordering.len();
    let responses = (0..first.responses.len())
        .map(|h| {
            Matrix::from_fn(k, k, |i, j| {
                results
                    .iter()
                    .zip(&weights)
                    .map(|((r, _), &w)| w * r.responses[h][(i, j)])
                    .sum()
            })
        })
        .collect();
    let shock_scale = (0..k)
        .map(|i| {
            results
                .iter()
                .zip(&weights)
                .map(|((r, _), &w)| w * r.shock_scale[i])
                .sum()
        })
        .collect();
    Ok(IrfResult {
        horizon: first.horizon,
        ordering: first.ordering.clone(),
        responses,
        shock_scale,
    })
}
