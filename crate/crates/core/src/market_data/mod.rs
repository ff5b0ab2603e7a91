//! Raw market observations and the analysis variables built from them.

mod ingest;
mod panel;
mod series;
mod stats;
mod transform;

pub use ingest::{
    read_entities, read_observations, write_entities, write_observations, EntityObservations,
    EntityRecord, ObservationRow, ENTITY_HEADER, OBSERVATION_HEADER,
};
pub use panel::{align, entity_panel, AlignedPanel, EntityLevels, Variable};
pub use series::{common_dates, FieldKind, ObservationSeries};
pub use stats::{autocorrelation, correlation_matrix, mean_matrix};
pub use transform::{
    bond_spread, cumulative_sum, first_difference, five_year_yield, interpolate_yield, log_return,
    mid_cds_spread, YieldSource, SUBSTITUTE_MIN_MATURITY,
};
