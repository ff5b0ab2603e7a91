//! Thirteen-entity synthetic batch shaped like the French sample: same
//! names, sectors, market capitalizations and observation windows, with a
//! configurable lead of share returns over CDS spread changes and of CDS
//! spread changes over bond spread changes.

use std::collections::BTreeMap;
use std::io::Write;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{business_days, business_days_between, simulate, DgpSpec, NormalStream};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::market_data::{
    write_entities, write_observations, EntityObservations, EntityRecord, FieldKind,
    ObservationRow, ObservationSeries, Variable,
};

/// Static description of one sample firm plus its simulation scales.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BatchEntity {
    pub id: &'static str,
    pub name: &'static str,
    pub sector: &'static str,
    /// Euros, as of 23 April 2007.
    pub market_cap: f64,
    pub start: (i32, u32, u32),
    pub rs_sd: f64,
    pub dbond_sd: f64,
    pub dcds_sd: f64,
    pub share_price: f64,
}

const fn entity(
    id: &'static str,
    name: &'static str,
    sector: &'static str,
    market_cap: f64,
    start: (i32, u32, u32),
    sds: (f64, f64, f64),
    share_price: f64,
) -> BatchEntity {
    BatchEntity {
        id,
        name,
        sector,
        market_cap,
        start,
        rs_sd: sds.0,
        dbond_sd: sds.1,
        dcds_sd: sds.2,
        share_price,
    }
}

pub const PAPER_ENTITIES: [BatchEntity; 13] = [
    entity(
        "ALU",
        "Alcatel",
        "Communications Equipment",
        21_480_016_011.30,
        (2001, 6, 26),
        (0.030, 1.5, 2.8),
        11.0,
    ),
    entity(
        "SAN",
        "Sanofi-Aventis",
        "Pharmaceutical Industry",
        90_959_774_639.53,
        (2001, 9, 4),
        (0.015, 0.8, 1.2),
        67.0,
    ),
    entity(
        "BNP",
        "BNP Paribas",
        "Banks",
        79_761_110_895.00,
        (2001, 9, 3),
        (0.017, 0.8, 1.0),
        84.0,
    ),
    entity(
        "EN",
        "Bouygues",
        "Construction and Related Machinery",
        20_043_133_894.21,
        (2002, 6, 19),
        (0.016, 1.2, 1.6),
        59.0,
    ),
    entity(
        "CA",
        "Carrefour",
        "Grocery Stores",
        40_574_200_332.96,
        (2001, 9, 4),
        (0.014, 0.9, 1.1),
        57.0,
    ),
    entity(
        "BN",
        "Danone",
        "Packaged Foods",
        32_396_792_805.74,
        (2001, 9, 4),
        (0.012, 0.8, 1.0),
        122.0,
    ),
    entity(
        "FTE",
        "France Telecom",
        "Integrated Telecommunication Services",
        54_713_063_223.00,
        (2001, 8, 29),
        (0.019, 1.3, 2.0),
        21.0,
    ),
    entity(
        "PP",
        "Pinault PR",
        "Department Stores",
        16_314_170_907.18,
        (2002, 3, 15),
        (0.017, 1.4, 2.2),
        133.0,
    ),
    entity(
        "RHA",
        "Rhodia",
        "Specialty Chemicals",
        3_588_474_798.52,
        (2002, 3, 25),
        (0.028, 1.5, 2.8),
        3.0,
    ),
    entity(
        "RNO",
        "Renault",
        "Automobile",
        26_539_043_170.52,
        (2001, 8, 29),
        (0.018, 1.2, 1.8),
        93.0,
    ),
    entity(
        "GLE",
        "Societe Generale",
        "Banks",
        69_836_607_458.70,
        (2001, 9, 3),
        (0.017, 0.9, 1.1),
        154.0,
    ),
    entity(
        "SW",
        "Sodexho",
        "Restaurants",
        8_981_811_806.24,
        (2002, 7, 22),
        (0.015, 1.0, 1.4),
        57.0,
    ),
    entity(
        "FP",
        "Total",
        "Integrated Oil & Gas",
        129_927_028_347.90,
        (2001, 9, 4),
        (0.014, 0.8, 0.9),
        54.0,
    ),
];

/// Starting levels for integrating simulated differences.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LevelBases {
    pub share_price: f64,
    pub cds_mid: f64,
    /// Half the bid–ask width.
    pub cds_half_spread: f64,
    pub bond_spread: f64,
    pub swap_rate: f64,
    /// Step standard deviation of the swap-rate random walk.
    pub swap_step_sd: f64,
}

impl Default for LevelBases {
    fn default() -> Self {
        Self {
            share_price: 50.0,
            cds_mid: 100.0,
            cds_half_spread: 0.5,
            bond_spread: 100.0,
            swap_rate: 400.0,
            swap_step_sd: 0.5,
        }
    }
}

fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid calendar date")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BatchConfig {
    pub seed: u64,
    /// Multiplier on every cross-market lag coefficient; zero removes all coupling.
    pub coupling: f64,
    /// Entities whose CDS spread changes load on lagged share returns.
    pub rs_to_dcds: Vec<String>,
    /// Entities whose bond spread changes load on lagged CDS spread changes.
    pub dcds_to_dbond: Vec<String>,
    /// Entities emitted without bond yield and swap series.
    pub without_bond: Vec<String>,
    pub window_end: NaiveDate,
    /// Last date with bond quotes.
    pub bond_end: NaiveDate,
    pub cds_mid: f64,
    pub bond_spread: f64,
    pub swap_rate: f64,
}

fn ids(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

impl Default for BatchConfig {
    fn default() -> Self {
        let bases = LevelBases::default();
        Self {
            seed: 2008,
            coupling: 1.0,
            rs_to_dcds: ids(&[
                "ALU", "SAN", "BNP", "EN", "CA", "FTE", "PP", "RHA", "RNO", "GLE", "SW",
            ]),
            dcds_to_dbond: ids(&["ALU", "EN", "BN", "FTE", "PP", "RHA", "RNO", "GLE"]),
            without_bond: Vec::new(),
            window_end: date(2008, 2, 21),
            bond_end: date(2007, 2, 8),
            cds_mid: bases.cds_mid,
            bond_spread: bases.bond_spread,
            swap_rate: bases.swap_rate,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PaperBatch {
    pub records: Vec<EntityRecord>,
    pub observations: Vec<EntityObservations<f64>>,
}

impl PaperBatch {
    /// Market-data CSV rows ordered by entity, date, then field.
    pub fn observation_rows(&self) -> Vec<ObservationRow<'_>> {
        let mut rows = Vec::new();
        for obs in &self.observations {
            let mut by_date: BTreeMap<NaiveDate, Vec<(FieldKind, f64)>> = BTreeMap::new();
            for (kind, s) in &obs.series {
                for (d, v) in s.iter() {
                    by_date.entry(d).or_default().push((*kind, v));
                }
            }
            for (d, fields) in by_date {
                rows.extend(
                    fields
                        .into_iter()
                        .map(|(field_kind, value)| ObservationRow {
                            date: d,
                            entity_id: &obs.entity_id,
                            field_kind,
                            value,
                        }),
                );
            }
        }
        rows
    }

    pub fn write_csv<W1: Write, W2: Write>(&self, observations: W1, entities: W2) -> Result<()> {
        write_observations(observations, self.observation_rows())?;
        write_entities(entities, &self.records)
    }
}

/// Lag matrices in `(RS, DBOND, DCDS)` order, built from coefficients on
/// standardized variables and rescaled by the entity's innovation scales.
fn entity_dgp(e: &BatchEntity, cfg: &BatchConfig, length: usize, seed: u64) -> DgpSpec<f64> {
    let c_rs = if cfg.rs_to_dcds.iter().any(|x| x == e.id) {
        cfg.coupling
    } else {
        0.0
    };
    let c_db = if cfg.dcds_to_dbond.iter().any(|x| x == e.id) {
        cfg.coupling
    } else {
        0.0
    };
    let sd = [e.rs_sd, e.dbond_sd, e.dcds_sd];
    let a1 = [
        [0.05, 0.0, 0.0],
        [0.0, -0.2, 0.25 * c_db],
        [-0.3 * c_rs, 0.0, 0.1],
    ];
    let a2 = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [-0.15 * c_rs, 0.0, -0.05]];
    let rho = [[1.0, -0.08, -0.15], [-0.08, 1.0, 0.10], [-0.15, 0.10, 1.0]];
    let scale = |a: [[f64; 3]; 3]| Matrix::from_fn(3, 3, |i, j| a[i][j] * sd[i] / sd[j]);
    let cov = Matrix::from_fn(3, 3, |i, j| rho[i][j] * sd[i] * sd[j]);
    DgpSpec::var_process(vec![scale(a1), scale(a2)], cov, length, seed)
}

/// Integrates a difference sample into raw market-data series on `dates`
/// (one more date than sample rows): prices by exponentiated cumulative log
/// returns, CDS quotes around a cumulated mid, and bond yields as a swap-rate
/// random walk plus the cumulated bond spread. `bond_end` truncates the bond
/// and swap series.
pub fn levels_from_differences(
    entity_id: &str,
    dates: &[NaiveDate],
    diffs: &Matrix<f64>,
    columns: &[Variable],
    bases: &LevelBases,
    bond_end: Option<NaiveDate>,
    seed: u64,
) -> Result<EntityObservations<f64>> {
    if dates.len() != diffs.rows() + 1 || columns.len() != diffs.cols() {
        return Err(Error::MismatchedShapes(
            "dates must exceed sample rows by one".into(),
        ));
    }
    let col = |v: Variable| columns.iter().position(|&c| c == v);
    let integrate = |j: usize, start: f64| {
        let mut out = Vec::with_capacity(dates.len());
        out.push(start);
        for t in 0..diffs.rows() {
            out.push(out[t] + diffs[(t, j)]);
        }
        out
    };
    let mut series = BTreeMap::new();
    let mut put = |kind: FieldKind, values: Vec<f64>, n: usize| -> Result<()> {
        let s = ObservationSeries::new(entity_id, kind, dates.iter().copied().zip(values).take(n))?;
        series.insert(kind, s);
        Ok(())
    };
    let n = dates.len();
    let rs = col(Variable::Rs).ok_or_else(|| Error::UnknownVariable("RS".into()))?;
    let log_growth = integrate(rs, 0.0);
    put(
        FieldKind::SharePrice,
        log_growth
            .iter()
            .map(|x| bases.share_price * x.exp())
            .collect(),
        n,
    )?;
    let dcds = col(Variable::Dcds).ok_or_else(|| Error::UnknownVariable("DCDS".into()))?;
    let mid = integrate(dcds, bases.cds_mid);
    put(
        FieldKind::CdsBid,
        mid.iter().map(|m| m - bases.cds_half_spread).collect(),
        n,
    )?;
    put(
        FieldKind::CdsAsk,
        mid.iter().map(|m| m + bases.cds_half_spread).collect(),
        n,
    )?;
    if let Some(db) = col(Variable::Dbond) {
        let nb = bond_end.map_or(n, |end| dates.iter().take_while(|d| **d <= end).count());
        let spread = integrate(db, bases.bond_spread);
        let mut noise = NormalStream::new(seed);
        let mut swap = Vec::with_capacity(n);
        let mut s = bases.swap_rate;
        for _ in 0..n {
            swap.push(s);
            s += bases.swap_step_sd * noise.standard_normal();
        }
        let yields = swap.iter().zip(&spread).map(|(w, b)| w + b).collect();
        put(FieldKind::SwapRate5y, swap, nb)?;
        put(FieldKind::BondYield, yields, nb)?;
    }
    Ok(EntityObservations {
        entity_id: entity_id.to_string(),
        series,
    })
}

pub fn paper_shaped_batch(cfg: &BatchConfig) -> Result<PaperBatch> {
    let known: Vec<&str> = PAPER_ENTITIES.iter().map(|e| e.id).collect();
    for id in cfg
        .rs_to_dcds
        .iter()
        .chain(&cfg.dcds_to_dbond)
        .chain(&cfg.without_bond)
    {
        if !known.contains(&id.as_str()) {
            return Err(Error::InvalidSpec(format!("unknown batch entity {id}")));
        }
    }
    let mut master = NormalStream::new(cfg.seed);
    let seeds: Vec<u64> = PAPER_ENTITIES.iter().map(|_| master.next_u64()).collect();
    let observations = PAPER_ENTITIES
        .par_iter()
        .zip(seeds)
        .map(|(e, seed)| {
            let start = date(e.start.0, e.start.1, e.start.2);
            let dates = business_days_between(start, cfg.window_end);
            if dates.len() < 3 {
                return Err(Error::InvalidSpec(format!(
                    "window for {} is too short",
                    e.id
                )));
            }
            let diffs = simulate(&entity_dgp(e, cfg, dates.len() - 1, seed))?;
            let bases = LevelBases {
                share_price: e.share_price,
                cds_mid: cfg.cds_mid,
                bond_spread: cfg.bond_spread,
                swap_rate: cfg.swap_rate,
                ..LevelBases::default()
            };
            let mut obs = levels_from_differences(
                e.id,
                &dates,
                &diffs,
                &Variable::ALL,
                &bases,
                Some(cfg.bond_end),
                seed ^ 0x5eed,
            )?;
            if cfg.without_bond.iter().any(|x| x == e.id) {
                obs.series.remove(&FieldKind::BondYield);
                obs.series.remove(&FieldKind::SwapRate5y);
            }
            Ok(obs)
        })
        .collect::<Result<Vec<_>>>()?;
    let records = PAPER_ENTITIES
        .iter()
        .map(|e| EntityRecord {
            entity_id: e.id.to_string(),
            name: e.name.to_string(),
            sector: e.sector.to_string(),
            market_cap: e.market_cap,
            window_start: date(e.start.0, e.start.1, e.start.2),
            window_end: cfg.window_end,
        })
        .collect();
    Ok(PaperBatch {
        records,
        observations,
    })
}

fn default_sim_id() -> String {
    "SIM".into()
}

fn default_sim_start() -> NaiveDate {
    date(2001, 1, 2)
}

fn default_sim_cap() -> f64 {
    1.0e9
}

/// Input document of the `simulate` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SimulationRequest {
    PaperShaped(BatchConfig),
    /// One entity from an explicit 2- or 3-variable difference process,
    /// columns `(RS, DCDS)` or `(RS, DBOND, DCDS)`.
    VarProcess {
        #[serde(default = "default_sim_id")]
        entity_id: String,
        #[serde(default = "default_sim_start")]
        start: NaiveDate,
        #[serde(default = "default_sim_cap")]
        market_cap: f64,
        #[serde(default)]
        bases: LevelBases,
        dgp: DgpSpec<f64>,
    },
}

pub fn generate_dataset(request: &SimulationRequest) -> Result<PaperBatch> {
    match request {
        SimulationRequest::PaperShaped(cfg) => paper_shaped_batch(cfg),
        SimulationRequest::VarProcess {
            entity_id,
            start,
            market_cap,
            bases,
            dgp,
        } => {
            let columns = match dgp.k {
                2 => vec![Variable::Rs, Variable::Dcds],
                3 => Variable::ALL.to_vec(),
                k => {
                    return Err(Error::InvalidSpec(format!(
                        "dataset simulation needs k in {{2, 3}}, got {k}"
                    )))
                }
            };
            let diffs = simulate(dgp)?;
            let dates = business_days(*start, dgp.length + 1);
            let obs = levels_from_differences(
                entity_id,
                &dates,
                &diffs,
                &columns,
                bases,
                None,
                dgp.seed ^ 0x5eed,
            )?;
            let record = EntityRecord {
                entity_id: entity_id.clone(),
                name: entity_id.clone(),
                sector: "Simulated".into(),
                market_cap: *market_cap,
                window_start: dates[0],
                window_end: *dates.last().expect("non-empty grid"),
            };
            record.validate()?;
            Ok(PaperBatch {
                records: vec![record],
                observations: vec![obs],
            })
        }
    }
}
