//! Construction of the analysis variables from raw quotes.

use serde::{Deserialize, Serialize};

use super::series::{common_dates, FieldKind, ObservationSeries};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Natural-log share return `ln(P_t / P_{t-1})`, no dividend adjustment.
pub fn log_return<T: Scalar>(prices: &ObservationSeries<T>) -> Result<ObservationSeries<T>> {
    if prices.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: prices.len(),
        });
    }
    if let Some((date, value)) = prices.iter().find(|(_, v)| !(*v > T::zero())) {
        return Err(Error::NonPositivePrice {
            date,
            value: value.as_f64(),
        });
    }
    let v = prices.values();
    let points = prices.dates()[1..]
        .iter()
        .zip(v.windows(2))
        .map(|(&d, w)| (d, (w[1] / w[0]).ln()));
    ObservationSeries::new(prices.entity_id(), FieldKind::ShareReturn, points)
}

fn inner_join<T: Scalar>(
    a: &ObservationSeries<T>,
    b: &ObservationSeries<T>,
    kind: FieldKind,
    mut combine: impl FnMut(chrono::NaiveDate, T, T) -> Result<T>,
) -> Result<ObservationSeries<T>> {
    let dates = common_dates(&[a, b]);
    if dates.is_empty() {
        return Err(Error::EmptyOverlap);
    }
    let points = dates
        .iter()
        .map(|&d| {
            let x = a.value_at(d).expect("common date");
            let y = b.value_at(d).expect("common date");
            combine(d, x, y).map(|v| (d, v))
        })
        .collect::<Result<Vec<_>>>()?;
    ObservationSeries::new(a.entity_id(), kind, points)
}

/// Bid/ask midpoint on shared dates; unshared dates are dropped.
pub fn mid_cds_spread<T: Scalar>(
    bid: &ObservationSeries<T>,
    ask: &ObservationSeries<T>,
) -> Result<ObservationSeries<T>> {
    let half = T::lit(0.5);
    inner_join(bid, ask, FieldKind::CdsSpread, |date, b, a| {
        if a < b {
            return Err(Error::CrossedQuote { date });
        }
        // b + (a - b)/2 keeps the result inside [b, a] under rounding
        Ok(b + (a - b) * half)
    })
}

/// Bond yield minus the five-year swap rate on shared dates.
pub fn bond_spread<T: Scalar>(
    bond_yield: &ObservationSeries<T>,
    swap_rate: &ObservationSeries<T>,
) -> Result<ObservationSeries<T>> {
    inner_join(bond_yield, swap_rate, FieldKind::BondSpread, |_, y, s| {
        Ok(y - s)
    })
}

/// Linear interpolation in maturity between two bracketing bond yields.
pub fn interpolate_yield<T: Scalar>(below: (T, T), above: (T, T), target: T) -> Result<T> {
    let (m0, y0) = below;
    let (m1, y1) = above;
    if !(m0 < target && target < m1) {
        return Err(Error::TargetOutsideBracket {
            below: m0.as_f64(),
            above: m1.as_f64(),
            target: target.as_f64(),
        });
    }
    let w = (target - m0) / (m1 - m0);
    Ok(y0 + w * (y1 - y0))
}

/// How a five-year yield was obtained from the available bond quotes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum YieldSource {
    /// A bond with exactly the target maturity was quoted.
    Direct,
    Interpolated {
        below: f64,
        above: f64,
    },
    /// No bracket; the shortest bond at or beyond the fallback maturity was used as-is.
    Substituted {
        maturity: f64,
    },
}

/// Shortest maturity accepted as a direct substitute when no bracket exists.
pub const SUBSTITUTE_MIN_MATURITY: f64 = 3.5;

/// Five-year yield from `(maturity_years, yield)` quotes, recording provenance.
pub fn five_year_yield<T: Scalar>(quotes: &[(T, T)]) -> Result<(T, YieldSource)> {
    let target = T::lit(5.0);
    if let Some(&(_, y)) = quotes.iter().find(|(m, _)| *m == target) {
        return Ok((y, YieldSource::Direct));
    }
    let below = quotes
        .iter()
        .filter(|(m, _)| *m < target)
        .max_by(|a, b| a.0.partial_cmp(&b.0).expect("finite maturity"));
    let above = quotes
        .iter()
        .filter(|(m, _)| *m > target)
        .min_by(|a, b| a.0.partial_cmp(&b.0).expect("finite maturity"));
    if let (Some(&lo), Some(&hi)) = (below, above) {
        let y = interpolate_yield(lo, hi, target)?;
        return Ok((
            y,
            YieldSource::Interpolated {
                below: lo.0.as_f64(),
                above: hi.0.as_f64(),
            },
        ));
    }
    let floor = T::lit(SUBSTITUTE_MIN_MATURITY);
    quotes
        .iter()
        .filter(|(m, _)| *m >= floor)
        .min_by(|a, b| {
            let da = (a.0 - target).abs();
            let db = (b.0 - target).abs();
            da.partial_cmp(&db).expect("finite maturity")
        })
        .map(|&(m, y)| {
            (
                y,
                YieldSource::Substituted {
                    maturity: m.as_f64(),
                },
            )
        })
        .ok_or(Error::NoYieldQuote)
}

/// `x_t - x_{t-1}`, dated at `t`.
pub fn first_difference<T: Scalar>(series: &ObservationSeries<T>) -> Result<ObservationSeries<T>> {
    if series.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: series.len(),
        });
    }
    let v = series.values();
    let points = series.dates()[1..]
        .iter()
        .zip(v.windows(2))
        .map(|(&d, w)| (d, w[1] - w[0]));
    ObservationSeries::new(series.entity_id(), series.kind().differenced(), points)
}

/// Inverse of [`first_difference`]: running sum of `diffs` starting from `initial`.
pub fn cumulative_sum<T: Scalar>(initial: T, diffs: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(diffs.len() + 1);
    let mut acc = initial;
    out.push(acc);
    for &d in diffs {
        acc = acc + d;
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use chrono::NaiveDate;
    use proptest::prelude::*;

    fn dates(n: usize) -> Vec<NaiveDate> {
        let start = NaiveDate::from_ymd_opt(2001, 1, 1).unwrap();
        (0..n)
            .map(|i| start + chrono::Days::new(i as u64))
            .collect()
    }

    fn series(kind: FieldKind, values: &[f64]) -> ObservationSeries<f64> {
        ObservationSeries::from_parts("X", kind, dates(values.len()), values.to_vec()).unwrap()
    }

    #[test]
    fn log_return_of_constant_is_zero() {
        let r = log_return(&series(FieldKind::SharePrice, &[100.0, 100.0, 100.0])).unwrap();
        assert_eq!(r.values(), &[0.0, 0.0]);
        assert_eq!(r.dates(), &dates(3)[1..]);
    }

    #[test]
    fn log_return_hundred_to_hundred_five() {
        // ln(1.05) = 0.04879016416943200... (50-digit reference value)
        let r = log_return(&series(FieldKind::SharePrice, &[100.0, 105.0])).unwrap();
        assert_abs_diff_eq!(r.values()[0], 0.048_790_164_169_432_0, epsilon = 1e-15);
    }

    #[test]
    fn log_return_errors() {
        let short = log_return(&series(FieldKind::SharePrice, &[100.0]));
        assert!(matches!(short, Err(Error::TooShort { .. })));
        // a derived series can carry a non-positive value that the price kind would refuse
        let bad = series(FieldKind::Difference, &[1.0, -2.0]);
        assert!(matches!(
            log_return(&bad),
            Err(Error::NonPositivePrice { .. })
        ));
    }

    #[test]
    fn mid_spread_examples() {
        let bid = series(FieldKind::CdsBid, &[23.0, 7.0]);
        let ask = series(FieldKind::CdsAsk, &[24.0, 7.0]);
        let mid = mid_cds_spread(&bid, &ask).unwrap();
        assert_eq!(mid.values(), &[23.5, 7.0]);
        assert_eq!(mid.kind(), FieldKind::CdsSpread);
    }

    #[test]
    fn mid_spread_disjoint_and_crossed() {
        let bid = ObservationSeries::new("X", FieldKind::CdsBid, vec![(dates(2)[0], 1.0)]).unwrap();
        let ask = ObservationSeries::new("X", FieldKind::CdsAsk, vec![(dates(2)[1], 2.0)]).unwrap();
        assert!(matches!(
            mid_cds_spread(&bid, &ask),
            Err(Error::EmptyOverlap)
        ));
        let crossed = mid_cds_spread(
            &series(FieldKind::CdsBid, &[5.0]),
            &series(FieldKind::CdsAsk, &[4.0]),
        );
        assert!(matches!(crossed, Err(Error::CrossedQuote { .. })));
    }

    #[test]
    fn mid_spread_drops_unshared_dates() {
        let d = dates(3);
        let bid = ObservationSeries::new(
            "X",
            FieldKind::CdsBid,
            vec![(d[0], 1.0), (d[1], 2.0), (d[2], 3.0)],
        )
        .unwrap();
        let ask =
            ObservationSeries::new("X", FieldKind::CdsAsk, vec![(d[0], 2.0), (d[2], 4.0)]).unwrap();
        let mid = mid_cds_spread(&bid, &ask).unwrap();
        assert_eq!(mid.dates(), &[d[0], d[2]]);
        assert_eq!(mid.values(), &[1.5, 3.5]);
    }

    #[test]
    fn bond_spread_examples() {
        let y = series(FieldKind::BondYield, &[5.0, 4.0]);
        let s = series(FieldKind::SwapRate5y, &[4.2, 4.0]);
        let spread = bond_spread(&y, &s).unwrap();
        assert_abs_diff_eq!(spread.values()[0], 0.8, epsilon = 1e-15);
        assert_eq!(spread.values()[1], 0.0);
        let other =
            ObservationSeries::new("X", FieldKind::SwapRate5y, vec![(dates(5)[4], 1.0)]).unwrap();
        assert!(matches!(bond_spread(&y, &other), Err(Error::EmptyOverlap)));
    }

    #[test]
    fn interpolation_examples() {
        assert_eq!(interpolate_yield((4.0, 4.0), (6.0, 5.0), 5.0).unwrap(), 4.5);
        assert_eq!(interpolate_yield((4.0, 3.3), (6.0, 3.3), 5.0).unwrap(), 3.3);
        assert!(matches!(
            interpolate_yield((4.0, 4.0), (6.0, 5.0), 7.0),
            Err(Error::TargetOutsideBracket { .. })
        ));
    }

    #[test]
    fn five_year_yield_provenance() {
        assert_eq!(
            five_year_yield(&[(5.0, 4.1), (7.0, 4.5)]).unwrap(),
            (4.1, YieldSource::Direct)
        );
        let (y, src) = five_year_yield(&[(4.0, 4.0), (6.0, 5.0), (9.0, 6.0)]).unwrap();
        assert_eq!(y, 4.5);
        assert_eq!(
            src,
            YieldSource::Interpolated {
                below: 4.0,
                above: 6.0
            }
        );
        let (y, src) = five_year_yield(&[(2.0, 3.0), (3.75, 3.6)]).unwrap();
        assert_eq!(y, 3.6);
        assert_eq!(src, YieldSource::Substituted { maturity: 3.75 });
        assert!(matches!(
            five_year_yield(&[(2.0, 3.0)]),
            Err(Error::NoYieldQuote)
        ));
    }

    #[test]
    fn first_difference_examples() {
        let diff = first_difference(&series(FieldKind::CdsSpread, &[10.0, 12.0, 11.0])).unwrap();
        assert_eq!(diff.values(), &[2.0, -1.0]);
        assert_eq!(diff.kind(), FieldKind::CdsSpreadChange);
        let flat = first_difference(&series(FieldKind::BondSpread, &[3.0; 5])).unwrap();
        assert!(flat.values().iter().all(|&v| v == 0.0));
        assert!(matches!(
            first_difference(&series(FieldKind::BondSpread, &[1.0])),
            Err(Error::TooShort { .. })
        ));
    }

    proptest! {
        #[test]
        fn returns_telescope(prices in prop::collection::vec(0.5f64..500.0, 2..200)) {
            let s = series(FieldKind::SharePrice, &prices);
            let total: f64 = log_return(&s).unwrap().values().iter().sum();
            let want = (prices[prices.len() - 1] / prices[0]).ln();
            prop_assert!((total - want).abs() <= 1e-12 * want.abs().max(1.0));
        }

        #[test]
        fn difference_then_cumsum_is_identity(xs in prop::collection::vec(-1e3f64..1e3, 2..200)) {
            let s = series(FieldKind::CdsSpread, &xs);
            let diff = first_difference(&s).unwrap();
            let rebuilt = cumulative_sum(xs[0], diff.values());
            for (a, b) in rebuilt.iter().zip(&xs) {
                prop_assert!((a - b).abs() <= 1e-9);
            }
        }

        #[test]
        fn mid_within_quote(b in -100.0f64..500.0, w in 0.0f64..50.0) {
            let mid = mid_cds_spread(&series(FieldKind::CdsBid, &[b]), &series(FieldKind::CdsAsk, &[b + w])).unwrap();
            let m = mid.values()[0];
            prop_assert!(m >= b && m <= b + w);
        }

        #[test]
        fn interpolation_monotone_in_target(
            y0 in 0.0f64..10.0, dy in 0.0f64..5.0, t1 in 4.01f64..5.99, t2 in 4.01f64..5.99
        ) {
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            let a = interpolate_yield((4.0, y0), (6.0, y0 + dy), lo).unwrap();
            let b = interpolate_yield((4.0, y0), (6.0, y0 + dy), hi).unwrap();
            prop_assert!(a <= b + 1e-12);
            prop_assert!(a >= y0 - 1e-12 && b <= y0 + dy + 1e-12);
        }
    }
}
