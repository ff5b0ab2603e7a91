//! CSV ingestion and emission.
//!
//! Observations: `date,entity_id,field_kind,value`, one row per observation.
//! Entities: `entity_id,name,sector,market_cap,window_start,window_end`.
//! Dates are ISO-8601 (`YYYY-MM-DD`), decimals use a dot, headers are mandatory.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::panel::EntityLevels;
use super::series::{FieldKind, ObservationSeries};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const OBSERVATION_HEADER: [&str; 4] = ["date", "entity_id", "field_kind", "value"];
pub const ENTITY_HEADER: [&str; 6] = [
    "entity_id",
    "name",
    "sector",
    "market_cap",
    "window_start",
    "window_end",
];

/// Static description of one reference entity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntityRecord {
    pub entity_id: String,
    pub name: String,
    pub sector: String,
    pub market_cap: f64,
    pub window_start: NaiveDate,
    pub window_end: NaiveDate,
}

impl EntityRecord {
    pub fn validate(&self) -> Result<()> {
        if !(self.market_cap > 0.0) {
            return Err(Error::NonPositiveCap);
        }
        if self.window_start >= self.window_end {
            return Err(Error::InvalidSpec(format!(
                "observation window of {} must start before it ends",
                self.entity_id
            )));
        }
        Ok(())
    }
}

/// Every raw series observed for one entity.
#[derive(Clone, Debug, Default)]
pub struct EntityObservations<T> {
    pub entity_id: String,
    pub series: BTreeMap<FieldKind, ObservationSeries<T>>,
}

impl<T: Scalar> EntityObservations<T> {
    pub fn get(&self, kind: FieldKind) -> Option<&ObservationSeries<T>> {
        self.series.get(&kind)
    }

    pub fn has_bond_data(&self) -> bool {
        self.get(FieldKind::BondYield).is_some() && self.get(FieldKind::SwapRate5y).is_some()
    }

    /// Borrowed view of the level series needed by [`super::entity_panel`].
    pub fn levels(&self) -> Result<EntityLevels<'_, T>> {
        let need = |k: FieldKind| {
            self.get(k).ok_or_else(|| {
                Error::InvalidSpec(format!("entity {} has no {k} observations", self.entity_id))
            })
        };
        Ok(EntityLevels {
            entity_id: &self.entity_id,
            share_price: need(FieldKind::SharePrice)?,
            cds_bid: need(FieldKind::CdsBid)?,
            cds_ask: need(FieldKind::CdsAsk)?,
            bond_yield: self.get(FieldKind::BondYield),
            swap_rate: self.get(FieldKind::SwapRate5y),
        })
    }
}

fn check_header(headers: &csv::StringRecord, want: &[&str]) -> Result<()> {
    let got: Vec<&str> = headers.iter().map(str::trim).collect();
    if got != want {
        return Err(Error::parse(
            1,
            "header",
            format!("expected `{}`, found `{}`", want.join(","), got.join(",")),
        ));
    }
    Ok(())
}

fn parse_date(line: u64, column: &str, s: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
        .map_err(|e| Error::parse(line, column, format!("invalid date {s:?}: {e}")))
}

fn parse_number(line: u64, column: &str, s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::parse(line, column, format!("invalid number {s:?}")))?;
    if !v.is_finite() {
        return Err(Error::parse(line, column, "value is not finite"));
    }
    Ok(v)
}

fn field<'r>(rec: &'r csv::StringRecord, idx: usize, line: u64, name: &str) -> Result<&'r str> {
    rec.get(idx)
        .ok_or_else(|| Error::parse(line, name, "missing field"))
}

/// `(date, value, source line)` rows of one entity and field.
type RawRows = BTreeMap<(String, FieldKind), Vec<(NaiveDate, f64, u64)>>;

/// Parses the observations CSV into per-entity series, sorted by date.
pub fn read_observations<T: Scalar, R: Read>(
    reader: R,
) -> Result<BTreeMap<String, EntityObservations<T>>> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    check_header(rdr.headers()?, &OBSERVATION_HEADER)?;
    let mut raw: RawRows = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 4 {
            return Err(Error::parse(
                line,
                "row",
                format!("expected 4 fields, found {}", rec.len()),
            ));
        }
        let date = parse_date(line, "date", field(&rec, 0, line, "date")?)?;
        let entity = field(&rec, 1, line, "entity_id")?.trim();
        if entity.is_empty() {
            return Err(Error::parse(line, "entity_id", "empty entity id"));
        }
        let kind: FieldKind = field(&rec, 2, line, "field_kind")?
            .trim()
            .parse()
            .map_err(|m: String| Error::parse(line, "field_kind", m))?;
        let value = parse_number(line, "value", field(&rec, 3, line, "value")?)?;
        if kind == FieldKind::SharePrice && value <= 0.0 {
            return Err(Error::parse(line, "value", "share price must be positive"));
        }
        raw.entry((entity.to_string(), kind))
            .or_default()
            .push((date, value, line));
    }

    let mut out: BTreeMap<String, EntityObservations<T>> = BTreeMap::new();
    for ((entity, kind), mut pts) in raw {
        pts.sort_by_key(|p| p.0);
        if let Some(w) = pts.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::parse(
                w[1].2,
                "date",
                format!("duplicate {kind} observation for {entity} on {}", w[1].0),
            ));
        }
        let series =
            ObservationSeries::new(entity.clone(), kind, pts.iter().map(|p| (p.0, T::lit(p.1))))?;
        let slot = out
            .entry(entity.clone())
            .or_insert_with(|| EntityObservations {
                entity_id: entity.clone(),
                series: BTreeMap::new(),
            });
        slot.series.insert(kind, series);
    }

    // quotes must not be crossed
    for obs in out.values() {
        if let (Some(bid), Some(ask)) = (obs.get(FieldKind::CdsBid), obs.get(FieldKind::CdsAsk)) {
            for (d, a) in ask.iter() {
                if let Some(b) = bid.value_at(d) {
                    if a < b {
                        return Err(Error::CrossedQuote { date: d });
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn read_entities<R: Read>(reader: R) -> Result<Vec<EntityRecord>> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    check_header(rdr.headers()?, &ENTITY_HEADER)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 6 {
            return Err(Error::parse(
                line,
                "row",
                format!("expected 6 fields, found {}", rec.len()),
            ));
        }
        let record = EntityRecord {
            entity_id: field(&rec, 0, line, "entity_id")?.trim().to_string(),
            name: field(&rec, 1, line, "name")?.trim().to_string(),
            sector: field(&rec, 2, line, "sector")?.trim().to_string(),
            market_cap: parse_number(line, "market_cap", field(&rec, 3, line, "market_cap")?)?,
            window_start: parse_date(line, "window_start", field(&rec, 4, line, "window_start")?)?,
            window_end: parse_date(line, "window_end", field(&rec, 5, line, "window_end")?)?,
        };
        record
            .validate()
            .map_err(|e| Error::parse(line, "row", e.to_string()))?;
        out.push(record);
    }
    Ok(out)
}

/// One raw observation row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObservationRow<'a> {
    pub date: NaiveDate,
    pub entity_id: &'a str,
    pub field_kind: FieldKind,
    pub value: f64,
}

pub fn write_observations<'a, W: Write>(
    writer: W,
    rows: impl IntoIterator<Item = ObservationRow<'a>>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(OBSERVATION_HEADER)?;
    for r in rows {
        w.write_record([
            r.date.format("%Y-%m-%d").to_string(),
            r.entity_id.to_string(),
            r.field_kind.to_string(),
            r.value.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_entities<W: Write>(writer: W, records: &[EntityRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(ENTITY_HEADER)?;
    for r in records {
        w.write_record([
            r.entity_id.clone(),
            r.name.clone(),
            r.sector.clone(),
            r.market_cap.to_string(),
            r.window_start.format("%Y-%m-%d").to_string(),
            r.window_end.format("%Y-%m-%d").to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
date,entity_id,field_kind,value
2004-01-02,FTE,SharePrice,20.5
2004-01-02,FTE,CdsBid,23
2004-01-05,FTE,SharePrice,20.9
2004-01-02,FTE,CdsAsk,24
2004-01-02,ALU,SharePrice,11.0
";

    #[test]
    fn parses_and_groups_by_entity() {
        let obs = read_observations::<f64, _>(SAMPLE.as_bytes()).unwrap();
        assert_eq!(obs.len(), 2);
        let fte = &obs["FTE"];
        assert_eq!(
            fte.get(FieldKind::SharePrice).unwrap().values(),
            &[20.5, 20.9]
        );
        assert_eq!(fte.get(FieldKind::CdsAsk).unwrap().values(), &[24.0]);
        assert!(!fte.has_bond_data());
    }

    #[test]
    fn reports_row_and_column() {
        let bad = "date,entity_id,field_kind,value\n2004-01-02,FTE,SharePrice,20.5\n2004-13-02,FTE,SharePrice,1\n";
        match read_observations::<f64, _>(bad.as_bytes()) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(column, "date");
            }
            other => panic!("unexpected {other:?}"),
        }
        let bad = "date,entity_id,field_kind,value\n2004-01-02,FTE,Price,20.5\n";
        assert!(matches!(
            read_observations::<f64, _>(bad.as_bytes()),
            Err(Error::Parse { line: 2, ref column, .. }) if column == "field_kind"
        ));
        let bad = "date,entity_id,field_kind,value\n2004-01-02,FTE,SharePrice,abc\n";
        assert!(matches!(
            read_observations::<f64, _>(bad.as_bytes()),
            Err(Error::Parse { ref column, .. }) if column == "value"
        ));
    }

    #[test]
    fn header_is_mandatory() {
        let no_header = "2004-01-02,FTE,SharePrice,20.5\n";
        assert!(matches!(
            read_observations::<f64, _>(no_header.as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn duplicates_and_crossed_quotes_rejected() {
        let dup =
            "date,entity_id,field_kind,value\n2004-01-02,FTE,CdsBid,1\n2004-01-02,FTE,CdsBid,2\n";
        assert!(matches!(
            read_observations::<f64, _>(dup.as_bytes()),
            Err(Error::Parse { line: 3, .. })
        ));
        let crossed =
            "date,entity_id,field_kind,value\n2004-01-02,FTE,CdsBid,5\n2004-01-02,FTE,CdsAsk,4\n";
        assert!(matches!(
            read_observations::<f64, _>(crossed.as_bytes()),
            Err(Error::CrossedQuote { .. })
        ));
    }

    #[test]
    fn entities_round_trip() {
        let recs = vec![EntityRecord {
            entity_id: "FTE".into(),
            name: "France Telecom".into(),
            sector: "Integrated Telecommunication Services".into(),
            market_cap: 54_713_063_223.0,
            window_start: NaiveDate::from_ymd_opt(2001, 8, 29).unwrap(),
            window_end: NaiveDate::from_ymd_opt(2008, 2, 21).unwrap(),
        }];
        let mut buf = Vec::new();
        write_entities(&mut buf, &recs).unwrap();
        assert_eq!(read_entities(buf.as_slice()).unwrap(), recs);
    }

    #[test]
    fn entity_validation() {
        let csv = "entity_id,name,sector,market_cap,window_start,window_end\nX,X,S,0,2001-01-01,2002-01-01\n";
        assert!(read_entities(csv.as_bytes()).is_err());
        let csv = "entity_id,name,sector,market_cap,window_start,window_end\nX,X,S,1,2003-01-01,2002-01-01\n";
        assert!(read_entities(csv.as_bytes()).is_err());
    }
}
