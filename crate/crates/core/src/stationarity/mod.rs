//! Unit-root and stationarity tests: augmented Dickey-Fuller, Phillips-Perron
//! and KPSS, plus the per-panel battery and cross-entity counts.

mod adf;
pub mod critical;
mod kpss;
mod long_run;
mod pp;

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::market_data::{AlignedPanel, Variable};
use crate::scalar::Scalar;

pub use adf::{adf_test, adf_test_with, max_lag_schwert, AdfLags};
pub use kpss::kpss_test;
pub use long_run::{bartlett_long_run_variance, newey_west_bandwidth};
pub use pp::pp_test;

/// Shortest series any of the tests accepts.
pub const MIN_LENGTH: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TestKind {
    #[serde(rename = "ADF")]
    Adf,
    #[serde(rename = "PP")]
    PhillipsPerron,
    #[serde(rename = "KPSS")]
    Kpss,
}

impl TestKind {
    pub const ALL: [TestKind; 3] = [TestKind::Adf, TestKind::PhillipsPerron, TestKind::Kpss];

    pub fn name(self) -> &'static str {
        match self {
            TestKind::Adf => "ADF",
            TestKind::PhillipsPerron => "PP",
            TestKind::Kpss => "KPSS",
        }
    }

    /// KPSS rejects in the right tail, the Dickey-Fuller family in the left.
    pub fn right_tailed(self) -> bool {
        self == TestKind::Kpss
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Deterministic {
    #[default]
    ConstantOnly,
    ConstantAndTrend,
}

impl Deterministic {
    pub fn code(self) -> &'static str {
        match self {
            Deterministic::ConstantOnly => "c",
            Deterministic::ConstantAndTrend => "ct",
        }
    }

    pub(crate) fn terms(self) -> usize {
        match self {
            Deterministic::ConstantOnly => 1,
            Deterministic::ConstantAndTrend => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct CriticalValues<T> {
    pub one: T,
    pub five: T,
    pub ten: T,
}

/// Settings that are not part of the statistic's null distribution but
/// shape its value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Nuisance {
    /// Augmentation lags (ADF) or Bartlett bandwidth (PP, KPSS).
    pub lags: usize,
    pub deterministic: Deterministic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct UnitRootReport<T> {
    pub test_kind: TestKind,
    pub statistic: T,
    pub critical_values: CriticalValues<T>,
    pub reject_at_5pct: bool,
    pub reject_at_1pct: bool,
    pub nuisance: Nuisance,
    pub nobs: usize,
}

impl<T: Scalar> UnitRootReport<T> {
    pub(crate) fn new(
        test_kind: TestKind,
        statistic: T,
        critical_values: CriticalValues<T>,
        nuisance: Nuisance,
        nobs: usize,
    ) -> Self {
        let rejects = |cv: T| {
            if test_kind.right_tailed() {
                statistic > cv
            } else {
                statistic < cv
            }
        };
        Self {
            test_kind,
            statistic,
            reject_at_5pct: rejects(critical_values.five),
            reject_at_1pct: rejects(critical_values.one),
            critical_values,
            nuisance,
            nobs,
        }
    }

    /// Whether the 5% decision points to a stationary series: a rejected
    /// unit root (ADF, PP) or an unrejected stationarity null (KPSS).
    pub fn indicates_stationarity(&self) -> bool {
        if self.test_kind.right_tailed() {
            !self.reject_at_5pct
        } else {
            self.reject_at_5pct
        }
    }
}

/// The three reports for one panel column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct VariableBattery<T> {
    pub variable: Variable,
    pub adf: UnitRootReport<T>,
    pub pp: UnitRootReport<T>,
    pub kpss: UnitRootReport<T>,
}

impl<T: Scalar> VariableBattery<T> {
    pub fn reports(&self) -> [&UnitRootReport<T>; 3] {
        [&self.adf, &self.pp, &self.kpss]
    }
}

/// Runs ADF, PP and KPSS with default settings on every panel column.
pub fn stationarity_battery<T: Scalar>(panel: &AlignedPanel<T>) -> Result<Vec<VariableBattery<T>>> {
    if panel.is_empty() {
        return Err(crate::Error::EmptyList);
    }
    panel
        .columns()
        .iter()
        .map(|&v| {
            let x = panel.column(v)?;
            let det = Deterministic::default();
            Ok(VariableBattery {
                variable: v,
                adf: adf_test(&x, det, None)?,
                pp: pp_test(&x, det, None)?,
                kpss: kpss_test(&x, det, None)?,
            })
        })
        .collect()
}

/// Number of entities whose test indicates stationarity, per variable and
/// test, plus the count of KPSS rejections at 1%.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StationarityCounts {
    pub entities: usize,
    pub rows: Vec<StationarityCountRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationarityCountRow {
    pub variable: Variable,
    pub adf: usize,
    pub pp: usize,
    pub kpss: usize,
    pub kpss_rejected_at_1pct: usize,
}

pub fn stationarity_counts<T: Scalar>(batteries: &[Vec<VariableBattery<T>>]) -> StationarityCounts {
    let mut rows: Vec<StationarityCountRow> = Vec::new();
    for entity in batteries {
        for b in entity {
            let idx = match rows.iter().position(|r| r.variable == b.variable) {
                Some(i) => i,
                None => {
                    rows.push(StationarityCountRow {
                        variable: b.variable,
                        adf: 0,
                        pp: 0,
                        kpss: 0,
                        kpss_rejected_at_1pct: 0,
                    });
                    rows.len() - 1
                }
            };
            let row = &mut rows[idx];
            row.adf += usize::from(b.adf.indicates_stationarity());
            row.pp += usize::from(b.pp.indicates_stationarity());
            row.kpss += usize::from(b.kpss.indicates_stationarity());
            row.kpss_rejected_at_1pct += usize::from(b.kpss.reject_at_1pct);
        }
    }
    rows.sort_by_key(|r| r.variable);
    StationarityCounts {
        entities: batteries.len(),
        rows,
    }
}

pub const REPORT_CSV_HEADER: [&str; 9] = [
    "entity_id",
    "variable",
    "test",
    "statistic",
    "cv1",
    "cv5",
    "cv10",
    "reject5",
    "nuisance",
];

/// Writes `entity_id,variable,test,statistic,cv1,cv5,cv10,reject5,nuisance` rows.
pub fn write_report_csv<T: Scalar, W: Write>(
    writer: W,
    rows: &[(String, Vec<VariableBattery<T>>)],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(REPORT_CSV_HEADER)?;
    for (entity, batteries) in rows {
        for b in batteries {
            for r in b.reports() {
                w.write_record([
                    entity.clone(),
                    b.variable.name().to_string(),
                    r.test_kind.name().to_string(),
                    r.statistic.to_string(),
                    r.critical_values.one.to_string(),
                    r.critical_values.five.to_string(),
                    r.critical_values.ten.to_string(),
                    r.reject_at_5pct.to_string(),
                    format!(
                        "lags={};{}",
                        r.nuisance.lags,
                        r.nuisance.deterministic.code()
                    ),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn check_length(n: usize) -> Result<()> {
    if n < MIN_LENGTH {
        return Err(crate::Error::TooShort {
            needed: MIN_LENGTH,
            got: n,
        });
    }
    Ok(())
}

/// Residuals of `y` on a constant (and trend).
pub(crate) fn detrend<T: Scalar>(y: &[T], deterministic: Deterministic) -> Vec<T> {
    let n = y.len();
    let nf = T::from_usize_lossy(n);
    let ybar = y.iter().copied().sum::<T>() / nf;
    match deterministic {
        Deterministic::ConstantOnly => y.iter().map(|&v| v - ybar).collect(),
        Deterministic::ConstantAndTrend => {
            let tbar = (nf + T::one()) / T::lit(2.0);
            let mut sxy = T::zero();
            let mut sxx = T::zero();
            for (i, &v) in y.iter().enumerate() {
                let dt = T::from_usize_lossy(i + 1) - tbar;
                sxy = sxy + dt * (v - ybar);
                sxx = sxx + dt * dt;
            }
            let slope = sxy / sxx;
            y.iter()
                .enumerate()
                .map(|(i, &v)| v - ybar - slope * (T::from_usize_lossy(i + 1) - tbar))
                .collect()
        }
    }
}
