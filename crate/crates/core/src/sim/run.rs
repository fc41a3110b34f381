use rayon::prelude::*;

use super::{Delivery, Mobility, Network, SimConfig, SimError, SlotTrace, TraceLevel};
use crate::params::SystemParams;

pub const TRACE_ACTIVE: u8 = 1;
pub const TRACE_SINR_OK: u8 = 2;
/// The link was inside the statistics window and was observed in that slot.
pub const TRACE_INTERIOR: u8 = 4;

/// Slot-major per-link observations of one realization.
///
/// Entry `slot * links.len() + k` belongs to `links[k]`. Static runs trace
/// the interior links; high-mobility runs trace every link and mark the
/// slots in which it was interior.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub links: Vec<usize>,
    pub num_slots: usize,
    pub flags: Vec<u8>,
    pub interference: Option<Vec<f64>>,
}

impl Trace {
    fn new(links: Vec<usize>, num_slots: usize, level: TraceLevel) -> Self {
        let cells = links.len() * num_slots;
        Trace {
            links,
            num_slots,
            flags: vec![0; cells],
            interference: (level == TraceLevel::Full).then(|| vec![0.0; cells]),
        }
    }

    /// Builds a trace from per-slot rows; rows must be in slot order.
    pub fn from_rows(links: Vec<usize>, rows: &[SlotTrace], with_interference: bool) -> Self {
        let level = if with_interference {
            TraceLevel::Full
        } else {
            TraceLevel::Flags
        };
        let mut trace = Trace::new(links, rows.len(), level);
        for (s, row) in rows.iter().enumerate() {
            trace.record(s, row);
        }
        trace
    }

    fn record(&mut self, slot: usize, row: &SlotTrace) {
        let width = self.links.len();
        let mut k = 0;
        for obs in &row.observations {
            while self.links[k] != obs.link {
                k += 1;
            }
            let cell = slot * width + k;
            self.flags[cell] = TRACE_INTERIOR
                | if obs.active { TRACE_ACTIVE } else { 0 }
                | if obs.sinr_ok { TRACE_SINR_OK } else { 0 };
            if let Some(i) = self.interference.as_mut() {
                i[cell] = obs.interference;
            }
        }
    }

    pub fn width(&self) -> usize {
        self.links.len()
    }

    #[inline]
    pub fn flags_at(&self, slot: usize, k: usize) -> u8 {
        self.flags[slot * self.links.len() + k]
    }

    #[inline]
    pub fn interference_at(&self, slot: usize, k: usize) -> Option<f64> {
        self.interference
            .as_ref()
            .map(|i| i[slot * self.links.len() + k])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkRecord {
    pub arrivals: u64,
    pub delivered: Vec<Delivery>,
    /// Arrival slots of packets still queued when the run ended.
    pub stranded: Vec<u64>,
    pub interior_at_end: bool,
}

/// Raw output of one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizationRecord {
    pub index: usize,
    pub num_links: usize,
    /// Per slot: number of interior links.
    pub interior_series: Vec<u32>,
    /// Per slot: interior links with a non-empty queue at the start of the slot.
    pub nonempty_series: Vec<u32>,
    /// Per slot: packets queued at interior links at the start of the slot.
    pub queued_series: Vec<u64>,
    pub interior_attempts: u64,
    pub interior_successes: u64,
    pub links: Vec<LinkRecord>,
    pub trace: Option<Trace>,
}

/// Runs realization `index` to completion. Depends only on
/// `(params, config, index)`.
pub fn run_realization(
    params: &SystemParams,
    config: &SimConfig,
    index: usize,
) -> RealizationRecord {
    run_network(Network::new(*params, *config, index), index)
}

/// Steps a prepared network for `num_slots` slots of its configuration.
pub fn run_network(mut net: Network, index: usize) -> RealizationRecord {
    let config = *net.config();
    let n = net.topology().len();
    let traced: Vec<usize> = match config.mobility {
        Mobility::Static => (0..n).filter(|&i| net.is_interior(i)).collect(),
        Mobility::HighMobility => (0..n).collect(),
    };
    let mut trace = (config.trace != TraceLevel::Off)
        .then(|| Trace::new(traced, config.num_slots, config.trace));

    let slots = config.num_slots;
    let mut interior_series = Vec::with_capacity(slots);
    let mut nonempty_series = Vec::with_capacity(slots);
    let mut queued_series = Vec::with_capacity(slots);
    let (mut attempts, mut successes) = (0u64, 0u64);
    for s in 0..slots {
        let out = net.step_slot();
        interior_series.push(out.interior_links);
        nonempty_series.push(out.interior_nonempty);
        queued_series.push(out.interior_queued_packets);
        attempts += out.interior_attempts as u64;
        successes += out.interior_successes as u64;
        if let (Some(tr), Some(row)) = (trace.as_mut(), out.trace.as_ref()) {
            tr.record(s, row);
        }
    }

    let links = net
        .states()
        .iter()
        .enumerate()
        .map(|(i, st)| LinkRecord {
            arrivals: st.arrivals,
            delivered: st.delivered.clone(),
            stranded: st.queue.iter().copied().collect(),
            interior_at_end: net.is_interior(i),
        })
        .collect();

    RealizationRecord {
        index,
        num_links: n,
        interior_series,
        nonempty_series,
        queued_series,
        interior_attempts: attempts,
        interior_successes: successes,
        links,
        trace,
    }
}

/// Runs every realization, in parallel on the current rayon pool. The
/// result is ordered by realization index and identical for any thread count.
pub fn run_simulation(
    params: &SystemParams,
    config: &SimConfig,
) -> Result<Vec<RealizationRecord>, SimError> {
    let config = config.validate()?;
    Ok((0..config.num_realizations)
        .into_par_iter()
        .map(|i| run_realization(params, &config, i))
        .collect())
}
