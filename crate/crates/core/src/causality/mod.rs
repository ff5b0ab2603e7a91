//! Granger block-exclusion tests and orthogonalized impulse responses.

mod granger;
mod irf;

pub use crate::linalg::cholesky;
pub use granger::{
    causality_table, granger_test, granger_wald, table_directions, CausalityRow, CausalityTable,
    GrangerResult,
};
pub use irf::{
    cap_weighted_irf, cap_weights, impulse_response, ma_coefficients, IrfResult, DEFAULT_HORIZON,
};
