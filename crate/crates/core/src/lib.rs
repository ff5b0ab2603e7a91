//! Interdependence of share, CDS and bond markets.
//!
//! Builds share returns and credit-spread changes from raw quotes, tests them
//! for unit roots, estimates difference VARs by equation-wise least squares,
//! runs block-exclusion Granger tests and Cholesky-orthogonalized impulse
//! responses, and covers plain CDS premium/payout arithmetic.
//!
//! The statistical code is generic over [`Scalar`] (`f32`/`f64`); the `*64`
//! aliases below fix it to `f64`. CDS cash flows are generic over any exact
//! numeric type through [`cds::Amount`].

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod causality;
pub mod cds;
pub mod distributions;
pub mod error;
pub mod linalg;
pub mod market_data;
pub mod regression;
pub mod report;
pub mod scalar;
pub mod simulator;
pub mod stationarity;
pub mod var;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use market_data::{AlignedPanel, ObservationSeries, Variable};
pub use scalar::Scalar;

pub type Matrix64 = linalg::Matrix<f64>;
pub type Series64 = market_data::ObservationSeries<f64>;
pub type Panel64 = market_data::AlignedPanel<f64>;
pub type UnitRootReport64 = stationarity::UnitRootReport<f64>;
pub type VarFit64 = var::VarFit<f64>;
pub type GrangerResult64 = causality::GrangerResult<f64>;
pub type IrfResult64 = causality::IrfResult<f64>;
pub type DgpSpec64 = simulator::DgpSpec<f64>;
pub type CdsContract64 = cds::CdsContract<f64>;
