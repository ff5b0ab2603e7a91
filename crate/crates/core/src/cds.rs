//! Credit default swap cash flows and the CDS–bond basis rule.
//!
//! Premiums accrue in flat periods (annual spread split evenly over the
//! payment dates) and are summed undiscounted. No accrued premium is paid at
//! default. Amounts are generic so the arithmetic can run on exact rationals
//! as well as floats.

use std::fmt::Debug;
use std::io::Write;

use num_traits::{FromPrimitive, Num, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number type usable for currency amounts and rates.
pub trait Amount: Num + Clone + PartialOrd + ToPrimitive + FromPrimitive + Debug {}

impl<T: Num + Clone + PartialOrd + ToPrimitive + FromPrimitive + Debug> Amount for T {}

/// Basis points per unit.
fn basis_points<T: Amount>() -> T {
    T::from_u32(10_000).expect("10000 is representable")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CdsContract<T> {
    #[serde(rename = "entity")]
    pub reference_entity: String,
    pub notional: T,
    /// Annual premium in basis points of notional.
    pub spread_bp: T,
    pub tenor_years: T,
    pub payments_per_year: u32,
    pub recovery_rate: T,
}

impl<T: Amount> CdsContract<T> {
    pub fn validate(&self) -> Result<()> {
        let zero = T::zero();
        if !(self.notional > zero) {
            return Err(Error::InvalidContract("notional must be positive".into()));
        }
        if !(self.spread_bp >= zero) {
            return Err(Error::InvalidContract("spread must be non-negative".into()));
        }
        if !(self.tenor_years > zero) {
            return Err(Error::InvalidContract("tenor must be positive".into()));
        }
        if self.payments_per_year == 0 {
            return Err(Error::InvalidContract(
                "payments per year must be positive".into(),
            ));
        }
        if !(self.recovery_rate >= zero && self.recovery_rate <= T::one()) {
            return Err(Error::InvalidContract(
                "recovery rate must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }

    /// `tenor_years * payments_per_year`, which must be a whole number.
    pub fn period_count(&self) -> Result<usize> {
        self.validate()?;
        let ppy = T::from_u32(self.payments_per_year).ok_or(Error::NonIntegralPeriodCount)?;
        let n = self.tenor_years.clone() * ppy;
        let whole = n.to_u64().ok_or(Error::NonIntegralPeriodCount)?;
        match T::from_u64(whole) {
            Some(back) if back == n => {
                usize::try_from(whole).map_err(|_| Error::NonIntegralPeriodCount)
            }
            _ => Err(Error::NonIntegralPeriodCount),
        }
    }

    /// `notional * spread_bp / (10000 * payments_per_year)`.
    ///
    /// The product is formed before the single division so that round
    /// figures stay exact in binary floating point.
    pub fn period_payment(&self) -> Result<T> {
        self.validate()?;
        let ppy = T::from_u32(self.payments_per_year).ok_or(Error::NonIntegralPeriodCount)?;
        Ok(self.notional.clone() * self.spread_bp.clone() / (basis_points::<T>() * ppy))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PremiumSchedule<T> {
    /// `(1-based period index, payment)`.
    pub payments: Vec<(usize, T)>,
    pub total: T,
}

impl<T: Amount> PremiumSchedule<T> {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["period", "payment", "cumulative"])?;
        let mut cumulative = T::zero();
        for (i, p) in &self.payments {
            cumulative = cumulative + p.clone();
            w.write_record([i.to_string(), fmt_amount(p), fmt_amount(&cumulative)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Renders an amount through `f64`; whole values print without a fraction.
pub fn fmt_amount<T: Amount>(x: &T) -> String {
    match x.to_f64() {
        Some(v) => format!("{v}"),
        None => format!("{x:?}"),
    }
}

pub fn premium_schedule<T: Amount>(contract: &CdsContract<T>) -> Result<PremiumSchedule<T>> {
    let n = contract.period_count()?;
    let each = contract.period_payment()?;
    let count = T::from_usize(n).ok_or(Error::NonIntegralPeriodCount)?;
    Ok(PremiumSchedule {
        payments: (1..=n).map(|i| (i, each.clone())).collect(),
        total: each * count,
    })
}

/// `notional * (1 - recovery_rate)`.
pub fn default_payout<T: Amount>(contract: &CdsContract<T>) -> Result<T> {
    contract.validate()?;
    Ok(contract.notional.clone() * (T::one() - contract.recovery_rate.clone()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pnl<T> {
    pub buyer: T,
    pub seller: T,
}

/// Buyer and seller profit once the contract resolves after `periods_paid`
/// premiums, with or without a credit event. Always zero-sum.
pub fn pnl_at_resolution<T: Amount>(
    contract: &CdsContract<T>,
    credit_event: bool,
    periods_paid: usize,
) -> Result<Pnl<T>> {
    let total = contract.period_count()?;
    if periods_paid > total {
        return Err(Error::PeriodsOutOfRange {
            paid: periods_paid,
            total,
        });
    }
    let paid = contract.period_payment()?
        * T::from_usize(periods_paid).ok_or(Error::NonIntegralPeriodCount)?;
    let buyer = if credit_event {
        default_payout(contract)? - paid
    } else {
        T::zero() - paid
    };
    let seller = T::zero() - buyer.clone();
    Ok(Pnl { buyer, seller })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisSignal {
    SellCdsBuyBond,
    BuyCdsShortBond,
    NoArbitrage,
}

/// Default dead band around zero basis, in spread index units.
pub const DEFAULT_BASIS_TOLERANCE: f64 = 1.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisReport<T> {
    pub cds_spread: T,
    pub bond_spread: T,
    pub basis: T,
    pub signal: BasisSignal,
}

pub fn basis_signal<T: Amount>(cds_spread: T, bond_spread: T, tolerance: T) -> BasisReport<T> {
    let basis = cds_spread.clone() - bond_spread.clone();
    let signal = if basis > tolerance {
        BasisSignal::SellCdsBuyBond
    } else if basis < T::zero() - tolerance {
        BasisSignal::BuyCdsShortBond
    } else {
        BasisSignal::NoArbitrage
    };
    BasisReport {
        cds_spread,
        bond_spread,
        basis,
        signal,
    }
}

/// Everything the `cds` command reports for one contract.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CdsReport<T> {
    pub contract: CdsContract<T>,
    pub period_payment: T,
    pub periods: usize,
    pub total_premium: T,
    pub default_payout: T,
    /// Full term elapses with no credit event.
    pub no_event: Pnl<T>,
    /// Credit event before the first premium date.
    pub immediate_event: Pnl<T>,
}

pub fn cds_report<T: Amount>(
    contract: &CdsContract<T>,
) -> Result<(CdsReport<T>, PremiumSchedule<T>)> {
    let schedule = premium_schedule(contract)?;
    let periods = schedule.payments.len();
    let report = CdsReport {
        contract: contract.clone(),
        period_payment: contract.period_payment()?,
        periods,
        total_premium: schedule.total.clone(),
        default_payout: default_payout(contract)?,
        no_event: pnl_at_resolution(contract, false, periods)?,
        immediate_event: pnl_at_resolution(contract, true, 0)?,
    };
    Ok((report, schedule))
}

/// Parses a contract document `{entity, notional, spread_bp, tenor_years,
/// payments_per_year, recovery_rate}`.
pub fn parse_contract(text: &str) -> Result<CdsContract<f64>> {
    let contract: CdsContract<f64> = serde_json::from_str(text)
        .map_err(|e| Error::parse(e.line() as u64, e.column().to_string(), e.to_string()))?;
    contract.validate()?;
    Ok(contract)
}
