use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::f_survival;
use crate::error::{Error, Result};
use crate::linalg::{solve_spd, Matrix};
use crate::market_data::{AlignedPanel, Variable};
use crate::regression::OlsDesign;
use crate::scalar::Scalar;
use crate::var::{build_design, VarFit, VarSpec};

/// Block-exclusion test that all lags of `cause` are zero in the equation of `effect`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GrangerResult<T> {
    pub cause: Variable,
    pub effect: Variable,
    pub f_statistic: T,
    pub p_value: T,
    pub reject_at_5pct: bool,
    /// `(p, T_eff - m)`.
    pub dof: (usize, usize),
    pub ssr_restricted: T,
    pub ssr_unrestricted: T,
}

impl<T: Scalar> GrangerResult<T> {
    pub fn rejects_at(&self, level: f64) -> bool {
        self.p_value.as_f64() < level
    }
}

fn check_pair(spec: &VarSpec, cause: Variable, effect: Variable) -> Result<()> {
    if cause == effect {
        return Err(Error::InvalidSpec(format!("{cause} cannot cause itself")));
    }
    for v in [cause, effect] {
        if !spec.variables.contains(&v) {
            return Err(Error::UnknownVariable(v.name().into()));
        }
    }
    Ok(())
}

fn from_ssr<T: Scalar>(
    cause: Variable,
    effect: Variable,
    ssr_r: T,
    ssr_u: T,
    p: usize,
    df: usize,
) -> GrangerResult<T> {
    let f = ((ssr_r - ssr_u) / T::from_usize_lossy(p)) / (ssr_u / T::from_usize_lossy(df));
    let f = f.max(T::zero());
    let pv = f_survival(f.as_f64(), p as f64, df as f64);
    GrangerResult {
        cause,
        effect,
        f_statistic: f,
        p_value: T::lit(pv),
        reject_at_5pct: pv < 0.05,
        dof: (p, df),
        ssr_restricted: ssr_r,
        ssr_unrestricted: ssr_u,
    }
}

/// F = [(SSR_r - SSR_u)/p] / [SSR_u/(T_eff - m)] with restricted and
/// unrestricted regressions on the identical sample.
pub fn granger_test<T: Scalar>(
    panel: &AlignedPanel<T>,
    spec: &VarSpec,
    cause: Variable,
    effect: Variable,
) -> Result<GrangerResult<T>> {
    check_pair(spec, cause, effect)?;
    let design = build_design(panel, spec)?;
    let eq = spec
        .variables
        .iter()
        .position(|&v| v == effect)
        .expect("checked");
    let y = design.response.column(eq);
    let p = spec.lag_order;
    let dropped: Vec<usize> = (1..=p)
        .map(|l| spec.regressor_index(cause, l))
        .collect::<Result<_>>()?;
    let keep: Vec<usize> = (0..spec.n_regressors())
        .filter(|j| !dropped.contains(j))
        .collect();
    let x = &design.regressors;
    let restricted = Matrix::from_fn(x.rows(), keep.len(), |r, c| x[(r, keep[c])]);
    let unrestricted = OlsDesign::new(design.regressors)?;
    let fit_u = unrestricted.fit(&y);
    let fit_r = OlsDesign::new(restricted)?.fit(&y);
    Ok(from_ssr(
        cause,
        effect,
        fit_r.ssr,
        fit_u.ssr,
        p,
        fit_u.df_resid,
    ))
}

/// Wald form of the same hypothesis from the unrestricted coefficient
/// covariance: `b' V^-1 b / p`.
pub fn granger_wald<T: Scalar>(fit: &VarFit<T>, cause: Variable, effect: Variable) -> Result<T> {
    check_pair(&fit.spec, cause, effect)?;
    let eq = fit.equation_index(effect)?;
    let p = fit.spec.lag_order;
    let idx: Vec<usize> = (1..=p)
        .map(|l| fit.spec.regressor_index(cause, l))
        .collect::<Result<_>>()?;
    let b: Vec<T> = idx.iter().map(|&j| fit.coefficients[(eq, j)]).collect();
    let sigma2 = fit.equations[eq].ssr / T::from_usize_lossy(fit.df_resid());
    let v = Matrix::from_fn(p, p, |i, j| fit.xtx_inv[(idx[i], idx[j])] * sigma2);
    let z = solve_spd(&v, &b)?;
    Ok(b.iter().zip(&z).map(|(&x, &y)| x * y).sum::<T>() / T::from_usize_lossy(p))
}

/// Test directions in table order: for each variable pair `(a, b)` with
/// `a` before `b`, first `b -> a` then `a -> b`.
pub fn table_directions(variables: &[Variable]) -> Vec<(Variable, Variable)> {
    let mut out = Vec::new();
    for i in 0..variables.len() {
        for j in (i + 1)..variables.len() {
            out.push((variables[j], variables[i]));
            out.push((variables[i], variables[j]));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct CausalityRow<T> {
    pub entity_id: String,
    pub results: Vec<GrangerResult<T>>,
}

/// Yes/no grid of Granger decisions per entity and direction with totals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct CausalityTable<T> {
    pub directions: Vec<(Variable, Variable)>,
    pub level: f64,
    pub rows: Vec<CausalityRow<T>>,
    pub totals: Vec<usize>,
}

impl<T: Scalar> CausalityTable<T> {
    pub fn direction_label(d: (Variable, Variable)) -> String {
        format!("{} cause {}", d.0, d.1)
    }

    pub fn total(&self, cause: Variable, effect: Variable) -> Option<usize> {
        self.directions
            .iter()
            .position(|&d| d == (cause, effect))
            .map(|i| self.totals[i])
    }

    /// Header `entity,<direction>...`, yes/no cells and a final `TOTAL` row.
    pub fn write_csv<W: Write>(&self, writer: W, names: &dyn Fn(&str) -> String) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["entity".to_string()];
        header.extend(self.directions.iter().map(|&d| Self::direction_label(d)));
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec = vec![names(&row.entity_id)];
            rec.extend(row.results.iter().map(|r| {
                if r.rejects_at(self.level) {
                    "yes"
                } else {
                    "no"
                }
                .to_string()
            }));
            w.write_record(&rec)?;
        }
        let mut total = vec!["TOTAL".to_string()];
        total.extend(self.totals.iter().map(usize::to_string));
        w.write_record(&total)?;
        w.flush()?;
        Ok(())
    }
}

/// Runs every table direction on every entity panel.
pub fn causality_table<T: Scalar>(
    panels: &[AlignedPanel<T>],
    spec: &VarSpec,
    level: f64,
) -> Result<CausalityTable<T>> {
    let directions = table_directions(&spec.variables);
    let rows = panels
        .par_iter()
        .map(|panel| {
            let results = directions
                .iter()
                .map(|&(c, e)| granger_test(panel, spec, c, e))
                .collect::<Result<Vec<_>>>()?;
            Ok(CausalityRow {
                entity_id: panel.entity_id().to_string(),
                results,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let totals = (0..directions.len())
        .map(|d| {
            rows.iter()
                .filter(|r| r.results[d].rejects_at(level))
                .count()
        })
        .collect();
    Ok(CausalityTable {
        directions,
        level,
        rows,
        totals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direction_order_matches_table_layout() {
        let d = table_directions(&Variable::ALL);
        let labels: Vec<String> = d
            .iter()
            .map(|&x| CausalityTable::<f64>::direction_label(x))
            .collect();
        assert_eq!(
            labels,
            [
                "DBOND cause RS",
                "RS cause DBOND",
                "DCDS cause RS",
                "RS cause DCDS",
                "DCDS cause DBOND",
                "DBOND cause DCDS"
            ]
        );
        assert_eq!(table_directions(&[Variable::Rs, Variable::Dcds]).len(), 2);
    }

    #[test]
    fn equal_ssr_gives_zero_f() {
        let r = from_ssr::<f64>(Variable::Rs, Variable::Dcds, 3.0, 3.0, 5, 100);
        assert_eq!(r.f_statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert!(!r.reject_at_5pct);
    }

    #[test]
    fn invalid_pairs() {
        let spec = VarSpec::var2(1);
        assert!(check_pair(&spec, Variable::Rs, Variable::Rs).is_err());
        assert!(check_pair(&spec, Variable::Dbond, Variable::Rs).is_err());
    }
}
