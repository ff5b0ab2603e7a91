//! End-to-end study: ingest, per-entity statistics for each model and
//! sub-period, pooled tables, impulse-response plots and a JSON manifest of
//! every number written.

mod svg;
mod tables;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::causality::{
    cap_weighted_irf, cap_weights, causality_table, impulse_response, CausalityTable, IrfResult,
};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::market_data::{
    autocorrelation, correlation_matrix, entity_panel, mean_matrix, read_entities,
    read_observations, AlignedPanel, EntityObservations, EntityRecord, Variable,
};
use crate::stationarity::{
    stationarity_battery, stationarity_counts, write_report_csv, VariableBattery,
};
use crate::var::{
    aggregate_fits, conventions, fit_var, partition_windows, significance_count, VarFit, VarSpec,
};

pub use svg::line_chart;
pub use tables::{
    write_autocorrelation, write_coefficients, write_correlations, write_stationarity_counts,
};

/// Lags reported in the autocorrelation table.
pub const AUTOCORRELATION_LAGS: usize = 5;

fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid calendar date")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    pub observations: PathBuf,
    pub entities: PathBuf,
    pub lag_order: usize,
    /// Sub-period cut dates; each starts a new half-open window.
    pub breakpoints: Vec<NaiveDate>,
    pub significance: f64,
    pub irf_horizon: usize,
    pub output_dir: PathBuf,
    /// Carried into the manifest; the study itself draws no random numbers.
    pub seed: u64,
    /// Last date (inclusive) of the three-variable model's sample.
    pub var1_end: NaiveDate,
    /// Last date (inclusive) of the two-variable model's sample.
    pub var2_end: NaiveDate,
    pub plots: bool,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            observations: PathBuf::from("observations.csv"),
            entities: PathBuf::from("entities.csv"),
            lag_order: crate::var::DEFAULT_LAG_ORDER,
            breakpoints: vec![date(2004, 1, 1)],
            significance: 0.05,
            irf_horizon: crate::causality::DEFAULT_HORIZON,
            output_dir: PathBuf::from("study-output"),
            seed: 0,
            var1_end: date(2007, 2, 8),
            var2_end: date(2008, 2, 21),
            plots: true,
        }
    }
}

impl StudyConfig {
    /// Reads a JSON config; relative paths inside it resolve against the
    /// config file's directory.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut cfg: StudyConfig = serde_json::from_str(&text)
            .map_err(|e| Error::parse(e.line() as u64, e.column().to_string(), e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.observations,
            &mut cfg.entities,
            &mut cfg.output_dir,
        ] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lag_order == 0 {
            return Err(Error::InvalidSpec("lag_order must be at least 1".into()));
        }
        if self.irf_horizon == 0 {
            return Err(Error::InvalidSpec("irf_horizon must be at least 1".into()));
        }
        if !(self.significance > 0.0 && self.significance < 1.0) {
            return Err(Error::InvalidSpec("significance must lie in (0, 1)".into()));
        }
        partition_windows(&self.breakpoints)?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    #[serde(rename = "VAR1")]
    Var1,
    #[serde(rename = "VAR2")]
    Var2,
}

impl Model {
    pub const ALL: [Model; 2] = [Model::Var1, Model::Var2];

    pub fn name(self) -> &'static str {
        match self {
            Model::Var1 => "VAR1",
            Model::Var2 => "VAR2",
        }
    }

    pub fn spec(self, lag_order: usize) -> VarSpec {
        match self {
            Model::Var1 => VarSpec::var1(lag_order),
            Model::Var2 => VarSpec::var2(lag_order),
        }
    }

    pub fn needs_bond(self) -> bool {
        self == Model::Var1
    }

    pub fn end(self, cfg: &StudyConfig) -> NaiveDate {
        match self {
            Model::Var1 => cfg.var1_end,
            Model::Var2 => cfg.var2_end,
        }
    }
}

/// One labelled half-open window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Period {
    pub label: String,
    pub start: Option<NaiveDate>,
    pub end: NaiveDate,
}

/// `whole`, then `sub1`, `sub2`, ... cut at the breakpoints and capped at `end`.
pub fn periods(breakpoints: &[NaiveDate], end: NaiveDate) -> Result<Vec<Period>> {
    let mut out = vec![Period {
        label: "whole".into(),
        start: None,
        end,
    }];
    if !breakpoints.is_empty() {
        for (i, (lo, hi)) in partition_windows(breakpoints)?.into_iter().enumerate() {
            out.push(Period {
                label: format!("sub{}", i + 1),
                start: lo,
                end: hi.map_or(end, |h| h.min(end)),
            });
        }
    }
    Ok(out)
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

/// Loaded inputs of a study.
#[derive(Clone, Debug)]
pub struct StudyData {
    pub records: Vec<EntityRecord>,
    pub observations: BTreeMap<String, EntityObservations<f64>>,
}

impl StudyData {
    pub fn load(cfg: &StudyConfig) -> Result<Self> {
        let records = read_entities(fs::File::open(&cfg.entities)?)?;
        let observations = read_observations(fs::File::open(&cfg.observations)?)?;
        Ok(Self {
            records,
            observations,
        })
    }

    fn date_range(&self) -> Option<(NaiveDate, NaiveDate)> {
        let mut lo: Option<NaiveDate> = None;
        let mut hi: Option<NaiveDate> = None;
        for obs in self.observations.values() {
            for s in obs.series.values() {
                if let (Some(&a), Some(&b)) = (s.dates().first(), s.dates().last()) {
                    lo = Some(lo.map_or(a, |x| x.min(a)));
                    hi = Some(hi.map_or(b, |x| x.max(b)));
                }
            }
        }
        lo.zip(hi)
    }
}

/// Everything computed for one entity in one model and period.
#[derive(Clone, Debug)]
struct EntityRun {
    entity_id: String,
    correlation: Matrix<f64>,
    battery: Vec<VariableBattery<f64>>,
    autocorrelation: Vec<(Variable, Vec<f64>)>,
    fit: VarFit<f64>,
    irf: IrfResult<f64>,
}

fn run_entity(panel: &AlignedPanel<f64>, spec: &VarSpec, horizon: usize) -> Result<EntityRun> {
    let correlation = correlation_matrix(panel)?;
    let battery = stationarity_battery(panel)?;
    let autocorrelation = panel
        .columns()
        .iter()
        .map(|&v| Ok((v, autocorrelation(&panel.column(v)?, AUTOCORRELATION_LAGS)?)))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_var(panel, spec)?;
    let irf = impulse_response(&fit, horizon)?;
    Ok(EntityRun {
        entity_id: panel.entity_id().to_string(),
        correlation,
        battery,
        autocorrelation,
        fit,
        irf,
    })
}

/// Pooled results of one model and period.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub model: Model,
    pub period: Period,
    pub entities: Vec<String>,
    pub skipped: Vec<(String, String)>,
    pub causality: Option<CausalityTable<f64>>,
    pub irf: Option<IrfResult<f64>>,
    pub mean_correlation: Option<Matrix<f64>>,
}

/// Result of [`run_study`].
#[derive(Clone, Debug)]
pub struct StudyOutcome {
    pub manifest: Value,
    pub runs: Vec<RunSummary>,
    /// Paths relative to the output directory, in write order.
    pub files: Vec<String>,
}

struct Output<'a> {
    root: &'a Path,
    files: Vec<String>,
}

impl Output<'_> {
    fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<()> {
        write_atomic(&self.root.join(rel), bytes)?;
        self.files.push(rel.to_string());
        Ok(())
    }
}

fn matrix_json(m: &Matrix<f64>) -> Value {
    json!(m.to_rows())
}

fn labelled_matrix(vars: &[Variable], m: &Matrix<f64>) -> Value {
    let mut out = Map::new();
    for (i, a) in vars.iter().enumerate() {
        let row: Map<String, Value> = vars
            .iter()
            .enumerate()
            .map(|(j, b)| (b.to_string(), json!(m[(i, j)])))
            .collect();
        out.insert(a.to_string(), Value::Object(row));
    }
    Value::Object(out)
}

/// Runs the whole study and writes the report bundle under `output_dir`.
pub fn run_study(cfg: &StudyConfig) -> Result<StudyOutcome> {
    cfg.validate()?;
    let data = StudyData::load(cfg)?;
    run_study_on(cfg, &data)
}

pub fn run_study_on(cfg: &StudyConfig, data: &StudyData) -> Result<StudyOutcome> {
    cfg.validate()?;
    if data.records.is_empty() {
        return Err(Error::EmptyList);
    }
    let (first, last) = data.date_range().ok_or(Error::EmptyList)?;
    if let Some(b) = cfg.breakpoints.iter().find(|b| **b <= first || **b >= last) {
        return Err(Error::InvalidSpec(format!(
            "breakpoint {b} is not strictly inside the data window {first}..{last}"
        )));
    }
    let mut out = Output {
        root: &cfg.output_dir,
        files: Vec::new(),
    };
    let caps: BTreeMap<&str, f64> = data
        .records
        .iter()
        .map(|r| (r.entity_id.as_str(), r.market_cap))
        .collect();
    let names: BTreeMap<String, String> = data
        .records
        .iter()
        .map(|r| (r.entity_id.clone(), r.name.clone()))
        .collect();
    let weights = cap_weights(
        &data
            .records
            .iter()
            .map(|r| r.market_cap)
            .collect::<Vec<_>>(),
    )?;

    let mut runs_json = Vec::new();
    let mut runs = Vec::new();
    for model in Model::ALL {
        let spec = model.spec(cfg.lag_order);
        // configured ends are inclusive; windows are half-open
        let end = model.end(cfg).succ_opt().expect("date in range");
        // Full panels per entity, in entity-list order.
        let built: Vec<(String, Result<AlignedPanel<f64>>)> = data
            .records
            .par_iter()
            .map(|r| {
                let panel = match data.observations.get(&r.entity_id) {
                    None => Err(Error::InvalidSpec("no observations".into())),
                    Some(obs) if model.needs_bond() && !obs.has_bond_data() => {
                        Err(Error::InvalidSpec("no bond yield or swap rate data".into()))
                    }
                    Some(obs) => obs
                        .levels()
                        .and_then(|l| entity_panel(&l, model.needs_bond()))
                        .map(|p| p.window(None, Some(end))),
                };
                (r.entity_id.clone(), panel)
            })
            .collect();
        for period in periods(&cfg.breakpoints, end)? {
            let (summary, json) =
                run_period(cfg, model, &spec, &period, &built, &caps, &names, &mut out)?;
            runs.push(summary);
            runs_json.push(json);
        }
    }
    if runs.iter().all(|r| r.entities.is_empty()) {
        return Err(Error::DegenerateRegression(
            "no entity could be estimated in any model or period".into(),
        ));
    }

    let mut summary = csv::Writer::from_writer(Vec::new());
    summary.write_record([
        "model",
        "period",
        "RS cause DCDS",
        "DCDS cause RS",
        "entities",
    ])?;
    for r in &runs {
        let count = |c, e| {
            r.causality
                .as_ref()
                .and_then(|t| t.total(c, e))
                .map_or(String::new(), |x| x.to_string())
        };
        summary.write_record([
            r.model.name().to_string(),
            r.period.label.clone(),
            count(Variable::Rs, Variable::Dcds),
            count(Variable::Dcds, Variable::Rs),
            r.entities.len().to_string(),
        ])?;
    }
    let summary_bytes = summary
        .into_inner()
        .map_err(|e| Error::Io(e.into_error()))?;
    out.write("causality_summary.csv", &summary_bytes)?;

    let entities_json: Vec<Value> = data
        .records
        .iter()
        .zip(&weights)
        .map(|(r, w)| {
            json!({
                "entity_id": r.entity_id,
                "name": r.name,
                "sector": r.sector,
                "market_cap": r.market_cap,
                "cap_weight": w,
                "window_start": r.window_start.to_string(),
                "window_end": r.window_end.to_string(),
                "has_observations": data.observations.contains_key(&r.entity_id),
            })
        })
        .collect();
    let file_name = |p: &Path| p.file_name().map(|n| n.to_string_lossy().into_owned());
    let mut manifest = json!({
        "config": {
            "observations": file_name(&cfg.observations),
            "entities": file_name(&cfg.entities),
            "lag_order": cfg.lag_order,
            "breakpoints": cfg.breakpoints.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            "significance": cfg.significance,
            "irf_horizon": cfg.irf_horizon,
            "seed": cfg.seed,
            "var1_end": cfg.var1_end.to_string(),
            "var2_end": cfg.var2_end.to_string(),
        },
        "conventions": conventions(),
        "data_window": { "first": first.to_string(), "last": last.to_string() },
        "entities": entities_json,
        "runs": runs_json,
    });
    let mut files = out.files.clone();
    files.push("manifest.json".into());
    manifest["files"] = json!(files);
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    out.write("manifest.json", text.as_bytes())?;
    Ok(StudyOutcome {
        manifest,
        runs,
        files: out.files,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_period(
    cfg: &StudyConfig,
    model: Model,
    spec: &VarSpec,
    period: &Period,
    built: &[(String, Result<AlignedPanel<f64>>)],
    caps: &BTreeMap<&str, f64>,
    names: &BTreeMap<String, String>,
    out: &mut Output<'_>,
) -> Result<(RunSummary, Value)> {
    let dir = format!("{}/{}", model.name(), period.label);
    let min_rows = spec.recommended_min_rows();
    let mut skipped: Vec<(String, String)> = Vec::new();
    let mut panels = Vec::new();
    for (id, panel) in built {
        match panel {
            Err(e) => skipped.push((id.clone(), e.to_string())),
            Ok(p) => {
                let w = p.window(period.start, Some(period.end));
                if w.len() < min_rows {
                    skipped.push((
                        id.clone(),
                        Error::InsufficientSample {
                            needed: min_rows,
                            got: w.len(),
                        }
                        .to_string(),
                    ));
                } else {
                    panels.push(w);
                }
            }
        }
    }
    let results: Vec<Result<EntityRun>> = panels
        .par_iter()
        .map(|p| run_entity(p, spec, cfg.irf_horizon))
        .collect();
    let mut ok_runs = Vec::new();
    let mut ok_panels = Vec::new();
    for (p, r) in panels.into_iter().zip(results) {
        match r {
            Ok(run) => {
                ok_runs.push(run);
                ok_panels.push(p);
            }
            Err(e) => skipped.push((p.entity_id().to_string(), e.to_string())),
        }
    }
    for (id, why) in &skipped {
        warn!("{} {}: skipping {id}: {why}", model.name(), period.label);
    }
    let entities: Vec<String> = ok_runs.iter().map(|r| r.entity_id.clone()).collect();
    info!(
        "{} {}: {} entities",
        model.name(),
        period.label,
        entities.len()
    );

    let mut run_json = json!({
        "model": model.name(),
        "period": period.label,
        "window": {
            "start": period.start.map(|d| d.to_string()),
            "end_exclusive": period.end.to_string(),
        },
        "variables": spec.variables,
        "entities": entities,
        "skipped": skipped.iter().map(|(e, r)| json!({"entity_id": e, "reason": r})).collect::<Vec<_>>(),
    });
    let mut summary = RunSummary {
        model,
        period: period.clone(),
        entities: entities.clone(),
        skipped: skipped.clone(),
        causality: None,
        irf: None,
        mean_correlation: None,
    };
    if ok_runs.is_empty() {
        return Ok((summary, run_json));
    }
    let vars = &spec.variables;

    // Correlations.
    let corr = mean_matrix(
        &ok_runs
            .iter()
            .map(|r| r.correlation.clone())
            .collect::<Vec<_>>(),
    )?;
    out.write(
        &format!("{dir}/correlations.csv"),
        &csv_bytes(|b| write_correlations(b, vars, &corr))?,
    )?;
    let per_entity: Map<String, Value> = ok_runs
        .iter()
        .map(|r| (r.entity_id.clone(), labelled_matrix(vars, &r.correlation)))
        .collect();
    run_json["correlations"] =
        json!({ "mean": labelled_matrix(vars, &corr), "per_entity": per_entity });

    // Unit-root battery.
    let batteries: Vec<Vec<VariableBattery<f64>>> =
        ok_runs.iter().map(|r| r.battery.clone()).collect();
    let counts = stationarity_counts(&batteries);
    out.write(
        &format!("{dir}/stationarity_counts.csv"),
        &csv_bytes(|b| write_stationarity_counts(b, &counts))?,
    )?;
    let labelled: Vec<(String, Vec<VariableBattery<f64>>)> = ok_runs
        .iter()
        .map(|r| (r.entity_id.clone(), r.battery.clone()))
        .collect();
    out.write(
        &format!("{dir}/stationarity_tests.csv"),
        &csv_bytes(|b| write_report_csv(b, &labelled))?,
    )?;
    let tests: Map<String, Value> = labelled
        .iter()
        .map(|(e, b)| Ok((e.clone(), serde_json::to_value(b)?)))
        .collect::<Result<_>>()?;
    run_json["stationarity"] = json!({ "counts": counts, "tests": tests });

    // Autocorrelations, per entity plus the cross-entity mean.
    let mut ac_rows: Vec<(String, Variable, Vec<f64>)> = Vec::new();
    for r in &ok_runs {
        for (v, ac) in &r.autocorrelation {
            ac_rows.push((r.entity_id.clone(), *v, ac.clone()));
        }
    }
    let n = ok_runs.len() as f64;
    let means: Vec<(Variable, Vec<f64>)> = vars
        .iter()
        .map(|&v| {
            let m = (0..AUTOCORRELATION_LAGS)
                .map(|l| {
                    ac_rows
                        .iter()
                        .filter(|r| r.1 == v)
                        .map(|r| r.2[l])
                        .sum::<f64>()
                        / n
                })
                .collect();
            (v, m)
        })
        .collect();
    let mut all_rows = ac_rows.clone();
    all_rows.extend(
        means
            .iter()
            .map(|(v, m)| ("MEAN".to_string(), *v, m.clone())),
    );
    out.write(
        &format!("{dir}/autocorrelation.csv"),
        &csv_bytes(|b| write_autocorrelation(b, AUTOCORRELATION_LAGS, &all_rows))?,
    )?;
    let mut ac_json = Map::new();
    for (e, v, r) in &all_rows {
        ac_json
            .entry(e.clone())
            .or_insert_with(|| json!({}))
            .as_object_mut()
            .expect("object")
            .insert(v.to_string(), json!(r));
    }
    run_json["autocorrelation"] = Value::Object(ac_json);

    // Coefficient tables.
    let fits: Vec<VarFit<f64>> = ok_runs.iter().map(|r| r.fit.clone()).collect();
    let agg = aggregate_fits(&fits)?;
    let sig = significance_count(&fits, cfg.significance)?;
    out.write(
        &format!("{dir}/coefficients.csv"),
        &csv_bytes(|b| write_coefficients(b, &agg, &sig))?,
    )?;
    let fits_json: Map<String, Value> = fits
        .iter()
        .map(|f| (f.entity_id.clone(), f.to_table_json()))
        .collect();
    run_json["coefficients"] = json!({
        "regressors": spec.regressor_labels(),
        "mean_coefficients": matrix_json(&agg.mean_coefficients),
        "mean_t_statistics": matrix_json(&agg.mean_t_statistics),
        "significance_counts": sig,
        "mean_equations": agg.mean_equations,
    });
    run_json["fits"] = Value::Object(fits_json);
    run_json["t_eff"] = fits
        .iter()
        .map(|f| (f.entity_id.clone(), json!(f.t_eff())))
        .collect::<Map<_, _>>()
        .into();

    // Granger grid.
    let table = causality_table(&ok_panels, spec, cfg.significance)?;
    let name_of = |id: &str| names.get(id).cloned().unwrap_or_else(|| id.to_string());
    out.write(
        &format!("{dir}/causality.csv"),
        &csv_bytes(|b| table.write_csv(b, &name_of))?,
    )?;
    run_json["causality"] = serde_json::to_value(&table)?;

    // Cap-weighted impulse responses.
    let pooled: Vec<(IrfResult<f64>, f64)> = ok_runs
        .iter()
        .map(|r| {
            (
                r.irf.clone(),
                caps.get(r.entity_id.as_str()).copied().unwrap_or(f64::NAN),
            )
        })
        .collect();
    let irf = cap_weighted_irf(&pooled)?;
    out.write(&format!("{dir}/irf.csv"), &csv_bytes(|b| irf.write_csv(b))?)?;
    if cfg.plots {
        for &shock in vars {
            for &resp in vars {
                let path = irf.path(resp, shock)?;
                let svg = line_chart(
                    &format!(
                        "{} {}: response of {resp} to a one-s.d. {shock} shock",
                        model.name(),
                        period.label
                    ),
                    &format!("{resp}"),
                    &path,
                );
                out.write(
                    &format!("{dir}/plots/irf_{shock}_{resp}.svg"),
                    svg.as_bytes(),
                )?;
            }
        }
    }
    run_json["irf"] = serde_json::to_value(&irf)?;

    summary.causality = Some(table);
    summary.irf = Some(irf);
    summary.mean_correlation = Some(corr);
    Ok((summary, run_json))
}
