use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// What a series measures. The first six are raw vendor fields accepted by
/// the ingestion CSV; the rest are produced by the transforms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FieldKind {
    SharePrice,
    CdsBid,
    CdsAsk,
    BondYield,
    SwapRate5y,
    MarketCap,
    ShareReturn,
    CdsSpread,
    BondSpread,
    CdsSpreadChange,
    BondSpreadChange,
    Difference,
}

impl FieldKind {
    pub const RAW: [FieldKind; 6] = [
        FieldKind::SharePrice,
        FieldKind::CdsBid,
        FieldKind::CdsAsk,
        FieldKind::BondYield,
        FieldKind::SwapRate5y,
        FieldKind::MarketCap,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FieldKind::SharePrice => "SharePrice",
            FieldKind::CdsBid => "CdsBid",
            FieldKind::CdsAsk => "CdsAsk",
            FieldKind::BondYield => "BondYield",
            FieldKind::SwapRate5y => "SwapRate5y",
            FieldKind::MarketCap => "MarketCap",
            FieldKind::ShareReturn => "ShareReturn",
            FieldKind::CdsSpread => "CdsSpread",
            FieldKind::BondSpread => "BondSpread",
            FieldKind::CdsSpreadChange => "CdsSpreadChange",
            FieldKind::BondSpreadChange => "BondSpreadChange",
            FieldKind::Difference => "Difference",
        }
    }

    pub fn is_raw(self) -> bool {
        Self::RAW.contains(&self)
    }

    /// Kind of the first difference of a series of this kind.
    pub fn differenced(self) -> FieldKind {
        match self {
            FieldKind::CdsSpread => FieldKind::CdsSpreadChange,
            FieldKind::BondSpread => FieldKind::BondSpreadChange,
            _ => FieldKind::Difference,
        }
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FieldKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        FieldKind::RAW
            .iter()
            .copied()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown field kind {s:?}"))
    }
}

/// Date-indexed values for one entity and one field.
///
/// Dates are strictly increasing. Share prices are strictly positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ObservationSeries<T> {
    entity_id: String,
    kind: FieldKind,
    dates: Vec<NaiveDate>,
    values: Vec<T>,
}

impl<T: Scalar> ObservationSeries<T> {
    pub fn new(
        entity_id: impl Into<String>,
        kind: FieldKind,
        points: impl IntoIterator<Item = (NaiveDate, T)>,
    ) -> Result<Self> {
        let (dates, values) = points.into_iter().unzip();
        Self::from_parts(entity_id, kind, dates, values)
    }

    pub fn from_parts(
        entity_id: impl Into<String>,
        kind: FieldKind,
        dates: Vec<NaiveDate>,
        values: Vec<T>,
    ) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::MismatchedShapes(format!(
                "{} dates, {} values",
                dates.len(),
                values.len()
            )));
        }
        if let Some(w) = dates.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::UnorderedDates { date: w[1] });
        }
        if kind == FieldKind::SharePrice {
            if let Some((d, v)) = dates.iter().zip(&values).find(|(_, v)| !(**v > T::zero())) {
                return Err(Error::NonPositivePrice {
                    date: *d,
                    value: v.as_f64(),
                });
            }
        }
        Ok(Self {
            entity_id: entity_id.into(),
            kind,
            dates,
            values,
        })
    }

    pub fn entity_id(&self) -> &str {
        &self.entity_id
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NaiveDate, T)> + '_ {
        self.dates.iter().copied().zip(self.values.iter().copied())
    }

    pub fn value_at(&self, date: NaiveDate) -> Option<T> {
        self.dates.binary_search(&date).ok().map(|i| self.values[i])
    }

    /// Keeps only the points whose date is in `dates` (which must be sorted).
    pub fn restrict_to(&self, dates: &[NaiveDate]) -> Self {
        let (d, v) = self
            .iter()
            .filter(|(date, _)| dates.binary_search(date).is_ok())
            .unzip();
        Self {
            entity_id: self.entity_id.clone(),
            kind: self.kind,
            dates: d,
            values: v,
        }
    }
}

/// Dates present in every series, ascending.
pub fn common_dates<T: Scalar>(series: &[&ObservationSeries<T>]) -> Vec<NaiveDate> {
    let Some((first, rest)) = series.split_first() else {
        return Vec::new();
    };
    first
        .dates()
        .iter()
        .copied()
        .filter(|d| rest.iter().all(|s| s.dates().binary_search(d).is_ok()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2002, 3, day).unwrap()
    }

    #[test]
    fn rejects_duplicate_and_unordered_dates() {
        let dup = ObservationSeries::new("A", FieldKind::CdsBid, vec![(d(1), 1.0), (d(1), 2.0)]);
        assert!(matches!(dup, Err(Error::UnorderedDates { .. })));
        let back = ObservationSeries::new("A", FieldKind::CdsBid, vec![(d(2), 1.0), (d(1), 2.0)]);
        assert!(matches!(back, Err(Error::UnorderedDates { .. })));
    }

    #[test]
    fn share_price_must_be_positive() {
        let s = ObservationSeries::new("A", FieldKind::SharePrice, vec![(d(1), 10.0), (d(2), 0.0)]);
        assert!(matches!(s, Err(Error::NonPositivePrice { .. })));
        // other kinds may be zero or negative
        assert!(ObservationSeries::new("A", FieldKind::BondSpread, vec![(d(1), -1.0)]).is_ok());
    }

    #[test]
    fn field_kind_round_trips_raw_names() {
        for k in FieldKind::RAW {
            assert_eq!(k.as_str().parse::<FieldKind>().unwrap(), k);
        }
        assert!("ShareReturn".parse::<FieldKind>().is_err());
    }

    #[test]
    fn common_dates_intersects() {
        let a = ObservationSeries::new(
            "A",
            FieldKind::CdsBid,
            vec![(d(1), 1.0), (d(2), 1.0), (d(4), 1.0)],
        )
        .unwrap();
        let b = ObservationSeries::new(
            "A",
            FieldKind::CdsAsk,
            vec![(d(2), 1.0), (d(3), 1.0), (d(4), 1.0)],
        )
        .unwrap();
        assert_eq!(common_dates(&[&a, &b]), vec![d(2), d(4)]);
    }
}
