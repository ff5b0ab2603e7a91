use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market_data::Variable;

/// Lag order used throughout the study.
pub const DEFAULT_LAG_ORDER: usize = 5;

/// Shape of one VAR system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarSpec {
    /// Equation and regressor-block order.
    pub variables: Vec<Variable>,
    pub lag_order: usize,
    /// Half-open `[start, end)` restriction applied to the panel before fitting.
    pub sample_window: Option<(NaiveDate, NaiveDate)>,
    pub include_intercept: bool,
}

impl VarSpec {
    pub fn new(variables: Vec<Variable>, lag_order: usize) -> Result<Self> {
        let spec = Self {
            variables,
            lag_order,
            sample_window: None,
            include_intercept: true,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `(RS, DBOND, DCDS)`.
    pub fn var1(lag_order: usize) -> Self {
        Self::new(Variable::ALL.to_vec(), lag_order).expect("valid VAR1")
    }

    /// `(RS, DCDS)`.
    pub fn var2(lag_order: usize) -> Self {
        Self::new(vec![Variable::Rs, Variable::Dcds], lag_order).expect("valid VAR2")
    }

    pub fn with_window(mut self, start: NaiveDate, end: NaiveDate) -> Result<Self> {
        self.sample_window = Some((start, end));
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lag_order == 0 {
            return Err(Error::InvalidSpec("lag order must be at least 1".into()));
        }
        if self.variables.is_empty() {
            return Err(Error::InvalidSpec("no variables".into()));
        }
        if self
            .variables
            .iter()
            .enumerate()
            .any(|(i, v)| self.variables[..i].contains(v))
        {
            return Err(Error::InvalidSpec("variables must be distinct".into()));
        }
        if let Some((s, e)) = self.sample_window {
            if s >= e {
                return Err(Error::InvalidSpec(
                    "sample window must start before it ends".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.variables.len()
    }

    /// Regressors per equation, `k p` plus the intercept.
    pub fn n_regressors(&self) -> usize {
        self.k() * self.lag_order + usize::from(self.include_intercept)
    }

    /// Column of `variable` at `lag` (1-based) in the regressor matrix.
    pub fn regressor_index(&self, variable: Variable, lag: usize) -> Result<usize> {
        let v = self
            .variables
            .iter()
            .position(|&x| x == variable)
            .ok_or_else(|| Error::UnknownVariable(variable.name().into()))?;
        if lag == 0 || lag > self.lag_order {
            return Err(Error::InvalidSpec(format!(
                "lag {lag} outside 1..={}",
                self.lag_order
            )));
        }
        Ok(usize::from(self.include_intercept) + v * self.lag_order + (lag - 1))
    }

    /// Regressor labels in column order: `Const`, then `RS(-1)` .. `DCDS(-p)`.
    pub fn regressor_labels(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.n_regressors());
        if self.include_intercept {
            out.push("Const".to_string());
        }
        for v in &self.variables {
            for lag in 1..=self.lag_order {
                out.push(format!("{}(-{lag})", v.name()));
            }
        }
        out
    }

    /// Row count below which batch runs skip an entity: `k p + p + 10`.
    pub fn recommended_min_rows(&self) -> usize {
        self.k() * self.lag_order + self.lag_order + 10
    }

    /// Whether two fits can be pooled.
    pub fn same_shape(&self, other: &Self) -> bool {
        self.variables == other.variables
            && self.lag_order == other.lag_order
            && self.include_intercept == other.include_intercept
    }
}
