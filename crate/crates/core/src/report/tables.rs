//! CSV renderings of the study tables.

use std::io::Write;

use crate::error::Result;
use crate::linalg::Matrix;
use crate::market_data::Variable;
use crate::stationarity::StationarityCounts;
use crate::var::FitAggregate;

/// Square matrix with variable names on both margins.
pub fn write_correlations<W: Write>(
    writer: W,
    variables: &[Variable],
    m: &Matrix<f64>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["variable".to_string()];
    header.extend(variables.iter().map(|v| v.to_string()));
    w.write_record(&header)?;
    for (i, v) in variables.iter().enumerate() {
        let mut rec = vec![v.to_string()];
        rec.extend((0..variables.len()).map(|j| m[(i, j)].to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_stationarity_counts<W: Write>(writer: W, counts: &StationarityCounts) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "variable",
        "ADF",
        "PP",
        "KPSS",
        "KPSS_reject_1pct",
        "entities",
    ])?;
    for r in &counts.rows {
        w.write_record([
            r.variable.to_string(),
            r.adf.to_string(),
            r.pp.to_string(),
            r.kpss.to_string(),
            r.kpss_rejected_at_1pct.to_string(),
            counts.entities.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `(entity, variable, [r_1 .. r_L])` rows; the caller appends a `MEAN` block.
pub fn write_autocorrelation<W: Write>(
    writer: W,
    lags: usize,
    rows: &[(String, Variable, Vec<f64>)],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["entity".to_string(), "variable".to_string()];
    header.extend((1..=lags).map(|l| format!("lag{l}")));
    w.write_record(&header)?;
    for (entity, v, r) in rows {
        let mut rec = vec![entity.clone(), v.to_string()];
        rec.extend(r.iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Mean coefficient, mean t and significance count per equation; lag rows
/// first, `Const` last, then the mean equation statistics.
pub fn write_coefficients<W: Write>(
    writer: W,
    agg: &FitAggregate<f64>,
    counts: &[Vec<usize>],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let spec = &agg.spec;
    let labels = spec.regressor_labels();
    let icpt = usize::from(spec.include_intercept);
    let mut header = vec!["regressor".to_string()];
    for v in &spec.variables {
        header.push(format!("{v} coefficient"));
        header.push(format!("{v} t"));
        header.push(format!("{v} significant"));
    }
    w.write_record(&header)?;
    for j in (icpt..labels.len()).chain(0..icpt) {
        let mut rec = vec![labels[j].clone()];
        for eq in 0..spec.k() {
            rec.push(agg.mean_coefficients[(eq, j)].to_string());
            rec.push(agg.mean_t_statistics[(eq, j)].to_string());
            rec.push(counts[eq][j].to_string());
        }
        w.write_record(&rec)?;
    }
    let n_stats = agg.mean_equations.first().map_or(0, |e| e.labelled().len());
    for s in 0..n_stats {
        let mut rec = vec![agg.mean_equations[0].labelled()[s].0.to_string()];
        for e in &agg.mean_equations {
            rec.push(e.labelled()[s].1.to_string());
            rec.push(String::new());
            rec.push(String::new());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
