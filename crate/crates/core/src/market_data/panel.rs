use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::series::{common_dates, ObservationSeries};
use super::transform::{bond_spread, first_difference, log_return, mid_cds_spread};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// The three stationary analysis variables, in canonical column order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variable {
    /// Daily log share return.
    #[serde(rename = "RS")]
    Rs,
    /// First difference of the bond spread.
    #[serde(rename = "DBOND")]
    Dbond,
    /// First difference of the mid CDS spread.
    #[serde(rename = "DCDS")]
    Dcds,
}

impl Variable {
    pub const ALL: [Variable; 3] = [Variable::Rs, Variable::Dbond, Variable::Dcds];

    pub fn name(self) -> &'static str {
        match self {
            Variable::Rs => "RS",
            Variable::Dbond => "DBOND",
            Variable::Dcds => "DCDS",
        }
    }

    /// Label used in the report tables.
    pub fn description(self) -> &'static str {
        match self {
            Variable::Rs => "Share returns",
            Variable::Dbond => "Bond spread changes",
            Variable::Dcds => "CDS spread changes",
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variable::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownVariable(s.to_string()))
    }
}

/// `T x k` matrix of analysis variables on a common date grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct AlignedPanel<T> {
    entity_id: String,
    dates: Vec<NaiveDate>,
    columns: Vec<Variable>,
    values: Matrix<T>,
}

impl<T: Scalar> AlignedPanel<T> {
    pub fn new(
        entity_id: impl Into<String>,
        dates: Vec<NaiveDate>,
        columns: Vec<Variable>,
        values: Matrix<T>,
    ) -> Result<Self> {
        let k = columns.len();
        if !(2..=3).contains(&k) {
            return Err(Error::InvalidSpec(format!(
                "panel needs 2 or 3 variables, got {k}"
            )));
        }
        if columns
            .iter()
            .enumerate()
            .any(|(i, c)| columns[..i].contains(c))
        {
            return Err(Error::InvalidSpec("duplicate panel column".into()));
        }
        if values.shape() != (dates.len(), k) {
            return Err(Error::MismatchedShapes(format!(
                "{} dates and {k} columns vs values {:?}",
                dates.len(),
                values.shape()
            )));
        }
        if let Some(w) = dates.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::UnorderedDates { date: w[1] });
        }
        if values.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec(
                "panel contains missing or non-finite values".into(),
            ));
        }
        Ok(Self {
            entity_id: entity_id.into(),
            dates,
            columns,
            values,
        })
    }

    pub fn entity_id(&self) -> &str {
        &self.entity_id
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn columns(&self) -> &[Variable] {
        &self.columns
    }

    pub fn values(&self) -> &Matrix<T> {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn k(&self) -> usize {
        self.columns.len()
    }

    pub fn position(&self, v: Variable) -> Result<usize> {
        self.columns
            .iter()
            .position(|&c| c == v)
            .ok_or_else(|| Error::UnknownVariable(v.name().into()))
    }

    pub fn column(&self, v: Variable) -> Result<Vec<T>> {
        Ok(self.values.column(self.position(v)?))
    }

    /// Rows with `start <= date < end`; either bound may be open.
    pub fn window(&self, start: Option<NaiveDate>, end: Option<NaiveDate>) -> Self {
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| {
                let d = self.dates[i];
                start.is_none_or(|s| d >= s) && end.is_none_or(|e| d < e)
            })
            .collect();
        let values = Matrix::from_fn(keep.len(), self.k(), |r, c| self.values[(keep[r], c)]);
        Self {
            entity_id: self.entity_id.clone(),
            dates: keep.iter().map(|&i| self.dates[i]).collect(),
            columns: self.columns.clone(),
            values,
        }
    }

    /// Same rows with a scaled copy of one column.
    pub fn scale_column(&self, v: Variable, factor: T) -> Result<Self> {
        let j = self.position(v)?;
        let values = Matrix::from_fn(self.len(), self.k(), |r, c| {
            let x = self.values[(r, c)];
            if c == j {
                x * factor
            } else {
                x
            }
        });
        Ok(Self {
            values,
            ..self.clone()
        })
    }
}

/// Inner join of transformed series into a panel with columns in canonical
/// `(RS, DBOND, DCDS)` order.
pub fn align<T: Scalar>(
    entity_id: &str,
    series: &[(Variable, &ObservationSeries<T>)],
) -> Result<AlignedPanel<T>> {
    if series.len() < 2 {
        return Err(Error::InvalidSpec(
            "alignment needs at least 2 variables".into(),
        ));
    }
    if let Some((_, s)) = series.iter().find(|(_, s)| s.entity_id() != entity_id) {
        return Err(Error::InvalidSpec(format!(
            "series for entity {} passed to panel of {entity_id}",
            s.entity_id()
        )));
    }
    let mut ordered: Vec<(Variable, &ObservationSeries<T>)> = series.to_vec();
    ordered.sort_by_key(|(v, _)| *v);
    let refs: Vec<&ObservationSeries<T>> = ordered.iter().map(|(_, s)| *s).collect();
    let dates = common_dates(&refs);
    if dates.is_empty() {
        return Err(Error::EmptyOverlap);
    }
    let k = ordered.len();
    let values = Matrix::from_fn(dates.len(), k, |r, c| {
        refs[c].value_at(dates[r]).expect("common date present")
    });
    AlignedPanel::new(
        entity_id,
        dates,
        ordered.iter().map(|(v, _)| *v).collect(),
        values,
    )
}

/// Raw vendor series for one entity.
#[derive(Clone, Debug)]
pub struct EntityLevels<'a, T> {
    pub entity_id: &'a str,
    pub share_price: &'a ObservationSeries<T>,
    pub cds_bid: &'a ObservationSeries<T>,
    pub cds_ask: &'a ObservationSeries<T>,
    pub bond_yield: Option<&'a ObservationSeries<T>>,
    pub swap_rate: Option<&'a ObservationSeries<T>>,
}

/// Full construction for one entity: level series are intersected on a
/// common date grid first, then returned and differenced on that grid.
///
/// With `with_bond` the panel is `(RS, DBOND, DCDS)`, otherwise `(RS, DCDS)`.
pub fn entity_panel<T: Scalar>(
    levels: &EntityLevels<'_, T>,
    with_bond: bool,
) -> Result<AlignedPanel<T>> {
    let cds = mid_cds_spread(levels.cds_bid, levels.cds_ask)?;
    let bond = if with_bond {
        let (Some(y), Some(s)) = (levels.bond_yield, levels.swap_rate) else {
            return Err(Error::InvalidSpec(format!(
                "entity {} has no bond yield or swap rate data",
                levels.entity_id
            )));
        };
        Some(bond_spread(y, s)?)
    } else {
        None
    };
    let mut level_refs = vec![levels.share_price, &cds];
    if let Some(b) = &bond {
        level_refs.push(b);
    }
    let grid = common_dates(&level_refs);
    if grid.len() < 2 {
        return Err(Error::EmptyOverlap);
    }
    let rs = log_return(&levels.share_price.restrict_to(&grid))?;
    let dcds = first_difference(&cds.restrict_to(&grid))?;
    let dbond = bond
        .map(|b| first_difference(&b.restrict_to(&grid)))
        .transpose()?;
    let mut cols = vec![(Variable::Rs, &rs), (Variable::Dcds, &dcds)];
    if let Some(d) = &dbond {
        cols.push((Variable::Dbond, d));
    }
    align(levels.entity_id, &cols)
}
