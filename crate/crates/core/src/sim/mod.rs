//! Slotted Monte Carlo simulation of the Poisson bipolar network with one
//! queue per link and SINR-based service.

mod network;
mod run;
mod topology;

pub use network::{Delivery, LinkState, Network, Observation, SlotOutcome, SlotTrace};
pub use run::{
    run_network, run_realization, run_simulation, LinkRecord, RealizationRecord, Trace,
    TRACE_ACTIVE, TRACE_INTERIOR, TRACE_SINR_OK,
};
pub use topology::{sample_topology, Link, Topology};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("window_side ({side}) must exceed twice the margin ({margin})")]
    Window { side: f64, margin: f64 },
    #[error("num_realizations must be at least 1")]
    Realizations,
    #[error("num_slots must be at least 1")]
    Slots,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mobility {
    /// Positions drawn once per realization.
    Static,
    /// Every link is moved to a fresh uniform position and orientation after each slot.
    HighMobility,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Traffic {
    /// Bernoulli(ξ) packet arrivals into FIFO queues.
    Bernoulli,
    /// Every queue is permanently non-empty.
    Backlogged,
}

/// What per-slot detail to keep for the designated (interior) links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceLevel {
    Off,
    /// Activity and SINR outcome bits.
    Flags,
    /// Flags plus the interference power at each designated receiver.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub window_side: f64,
    /// Links whose transmitter is closer than this to an edge contribute
    /// interference but no statistics.
    pub margin: f64,
    pub num_realizations: usize,
    pub num_slots: usize,
    pub mobility: Mobility,
    pub traffic: Traffic,
    pub seed: u64,
    pub trace: TraceLevel,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            window_side: 240.0,
            margin: 20.0,
            num_realizations: 200,
            num_slots: 1000,
            mobility: Mobility::Static,
            traffic: Traffic::Bernoulli,
            seed: 0,
            trace: TraceLevel::Off,
        }
    }
}

impl SimConfig {
    pub fn validate(self) -> Result<Self, SimError> {
        if !(self.window_side.is_finite()
            && self.margin >= 0.0
            && self.window_side > 2.0 * self.margin)
        {
            return Err(SimError::Window {
                side: self.window_side,
                margin: self.margin,
            });
        }
        if self.num_realizations == 0 {
            return Err(SimError::Realizations);
        }
        if self.num_slots == 0 {
            return Err(SimError::Slots);
        }
        Ok(self)
    }
}

/// Independent random streams of one realization.
///
/// All four derive from the root seed and the realization index alone, so
/// realizations can be generated in any order or concurrently.
#[derive(Debug, Clone)]
pub struct Streams {
    /// Topology draws and mobility moves.
    pub placement: ChaCha8Rng,
    /// ALOHA decisions and packet arrivals.
    pub traffic: ChaCha8Rng,
    /// Fading seen by transmitting links.
    pub fading: ChaCha8Rng,
    /// Fading seen by silent designated links (trace-only observations).
    pub probe: ChaCha8Rng,
}

impl Streams {
    pub fn new(seed: u64, realization: usize) -> Self {
        let stream = |purpose: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(((realization as u64) << 2) | purpose);
            rng
        };
        Streams {
            placement: stream(0),
            traffic: stream(1),
            fading: stream(2),
            probe: stream(3),
        }
    }
}
