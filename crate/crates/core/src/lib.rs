//! Analytics and simulation for massive and sporadic access (MSA) in
//! Poisson bipolar networks with interacting queues.
//!
//! - [`params`]: system parameters, design thresholds, stationary results.
//! - [`special`]: Lambert W₀, the gamma reflection product, bracketed roots.
//! - [`analytics`]: MSA region, regime boundaries, temporal correlations,
//!   high-mobility stationary solution.
//! - [`sim`]: slotted Monte Carlo of static and high-mobility networks.
//! - [`stats`]: estimators over simulation records.

pub mod analytics;
pub mod params;
pub mod sim;
pub mod special;
pub mod stats;

pub use analytics::{MsaRegion, RegimeClass, RegimeKind};
pub use params::{
    db_to_linear, derive_constants, validate_params, DerivedConstants, MaybeInfinite,
    MsaThresholds, ParamError, Stability, StationaryMetrics, SystemParams,
};
pub use sim::{Mobility, SimConfig, TraceLevel, Traffic};
pub use special::NumericTolerances;
pub use stats::SimEstimates;
