use std::collections::VecDeque;

use rand::Rng;
use rand_distr::Exp1;

use super::{sample_topology, Mobility, SimConfig, Streams, Topology, TraceLevel, Traffic};
use crate::params::SystemParams;

/// Dense path-gain tables above this many links would dominate memory.
const DENSE_GAIN_LIMIT: usize = 2048;

/// A delivered packet. Delay is `departure_slot − arrival_slot` ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Delivery {
    pub arrival_slot: u64,
    pub departure_slot: u64,
    /// Whether the link was inside the statistics window when the packet left.
    pub interior: bool,
}

impl Delivery {
    pub fn delay(&self) -> u64 {
        self.departure_slot - self.arrival_slot
    }
}

/// FIFO queue of one link. Arrivals enter at the slot boundary after the
/// one in which they are generated; departures leave just before the next.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinkState {
    pub queue: VecDeque<u64>,
    pub delivered: Vec<Delivery>,
    pub arrivals: u64,
}

/// What a designated receiver saw in one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub link: usize,
    pub interior: bool,
    pub active: bool,
    /// SINR exceeded θ; the link succeeds iff it was also active.
    pub sinr_ok: bool,
    /// Σ h·d^{−α} over the other active transmitters.
    pub interference: f64,
}

impl Observation {
    pub fn success(&self) -> bool {
        self.active && self.sinr_ok
    }
}

/// Per-link observations of one slot, for the designated links only.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SlotTrace {
    pub slot: u64,
    pub observations: Vec<Observation>,
}

/// Interior-link counters of one slot.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SlotOutcome {
    pub interior_links: u32,
    pub interior_nonempty: u32,
    pub interior_queued_packets: u64,
    pub interior_attempts: u32,
    pub interior_successes: u32,
    pub trace: Option<SlotTrace>,
}

/// State of one realization: topology, queues and random streams.
pub struct Network {
    params: SystemParams,
    config: SimConfig,
    topology: Topology,
    states: Vec<LinkState>,
    interior: Vec<bool>,
    gains: GainTable,
    streams: Streams,
    slot: u64,
    signal_gain: f64,
    active: Vec<usize>,
    is_active: Vec<bool>,
    successes: Vec<usize>,
}

impl Network {
    /// Samples the topology of realization `index` and empties all queues.
    pub fn new(params: SystemParams, config: SimConfig, index: usize) -> Self {
        let mut streams = Streams::new(config.seed, index);
        let topology = sample_topology(&params, &config, &mut streams.placement);
        Self::with_topology(params, config, topology, streams)
    }

    /// Starts from a given topology; used for hand-built scenarios.
    pub fn with_topology(
        params: SystemParams,
        config: SimConfig,
        topology: Topology,
        streams: Streams,
    ) -> Self {
        let n = topology.len();
        let mut net = Network {
            params,
            config,
            states: vec![LinkState::default(); n],
            interior: Vec::new(),
            gains: GainTable {
                dense: None,
                alpha: params.pathloss_alpha,
            },
            streams,
            slot: 0,
            signal_gain: params.link_distance_r0.powf(-params.pathloss_alpha),
            active: Vec::with_capacity(n),
            is_active: vec![false; n],
            successes: Vec::new(),
            topology,
        };
        net.refresh_geometry();
        net
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn states(&self) -> &[LinkState] {
        &self.states
    }

    pub fn is_interior(&self, link: usize) -> bool {
        self.interior[link]
    }

    pub fn slot(&self) -> u64 {
        self.slot
    }

    fn refresh_geometry(&mut self) {
        let n = self.topology.len();
        self.interior = (0..n).map(|i| self.topology.is_interior(i)).collect();
        self.gains.dense = None;
        if self.config.mobility == Mobility::Static && n <= DENSE_GAIN_LIMIT {
            let mut g = vec![0.0; n * n];
            for rx in 0..n {
                for tx in 0..n {
                    if rx != tx {
                        g[rx * n + tx] = self.gains.path_gain(&self.topology, rx, tx);
                    }
                }
            }
            self.gains.dense = Some(g);
        }
    }

    /// Advances one slot:
    /// 1. every link with a non-empty queue (all links when backlogged)
    ///    transmits with probability p;
    /// 2. unit-mean exponential fading is drawn for every active
    ///    transmitter towards each receiver that needs evaluation;
    /// 3. an active link succeeds iff h·r₀^{−α} / (I + W) > θ;
    /// 4. successful head-of-line packets depart at the end of the slot;
    /// 5. Bernoulli(ξ) arrivals join the queues right after the boundary;
    /// 6. under high mobility all links then move to fresh positions.
    pub fn step_slot(&mut self) -> SlotOutcome {
        let n = self.topology.len();
        let t = self.slot;
        let p = self.params.transmit_prob_p;
        let backlogged = self.config.traffic == Traffic::Backlogged;
        let tracing = self.config.trace != TraceLevel::Off;
        let mut out = SlotOutcome::default();

        self.active.clear();
        for i in 0..n {
            let queued = self.states[i].queue.len();
            let nonempty = backlogged || queued > 0;
            if self.interior[i] {
                out.interior_links += 1;
                out.interior_nonempty += nonempty as u32;
                out.interior_queued_packets += queued as u64;
            }
            let on = nonempty && self.streams.traffic.random::<f64>() < p;
            self.is_active[i] = on;
            if on {
                self.active.push(i);
            }
        }

        let theta = self.params.sinr_threshold_theta;
        let noise = self.params.noise_w;
        let mut trace = tracing.then(|| SlotTrace {
            slot: t,
            observations: Vec::new(),
        });
        self.successes.clear();
        for j in 0..n {
            let active = self.is_active[j];
            let observe = tracing && self.interior[j];
            if !active && !observe {
                continue;
            }
            let rng = if active {
                &mut self.streams.fading
            } else {
                &mut self.streams.probe
            };
            let h_signal: f64 = rng.sample(Exp1);
            let mut interference = 0.0;
            for &i in &self.active {
                if i != j {
                    let h: f64 = rng.sample(Exp1);
                    interference += h * self.gains.gain(&self.topology, j, i);
                }
            }
            let sinr_ok = h_signal * self.signal_gain > theta * (interference + noise);
            if active {
                if self.interior[j] {
                    out.interior_attempts += 1;
                    out.interior_successes += sinr_ok as u32;
                }
                if sinr_ok {
                    self.successes.push(j);
                }
            }
            if let Some(tr) = trace.as_mut().filter(|_| observe) {
                tr.observations.push(Observation {
                    link: j,
                    interior: true,
                    active,
                    sinr_ok,
                    interference,
                });
            }
        }

        if !backlogged {
            for &j in &self.successes {
                let state = &mut self.states[j];
                let arrival_slot = state.queue.pop_front().expect("active link has a packet");
                state.delivered.push(Delivery {
                    arrival_slot,
                    departure_slot: t + 1,
                    interior: self.interior[j],
                });
            }
            let xi = self.params.arrival_rate_xi;
            for state in &mut self.states {
                if self.streams.traffic.random::<f64>() < xi {
                    state.queue.push_back(t + 1);
                    state.arrivals += 1;
                }
            }
        }

        if self.config.mobility == Mobility::HighMobility {
            self.topology
                .resample_positions(self.params.link_distance_r0, &mut self.streams.placement);
            self.refresh_geometry();
        }
        self.slot += 1;
        out.trace = trace;
        out
    }
}

/// Path gains d^{−α} from transmitters to receivers, tabulated when static.
struct GainTable {
    /// Row-major `[rx * n + tx]`.
    dense: Option<Vec<f64>>,
    alpha: f64,
}

impl GainTable {
    fn path_gain(&self, topology: &Topology, rx: usize, tx: usize) -> f64 {
        let r = topology.links[rx].rx;
        let t = topology.links[tx].tx;
        let d2 = (r[0] - t[0]).powi(2) + (r[1] - t[1]).powi(2);
        d2.powf(-0.5 * self.alpha)
    }

    #[inline]
    fn gain(&self, topology: &Topology, rx: usize, tx: usize) -> f64 {
        match &self.dense {
            Some(g) => g[rx * topology.len() + tx],
            None => self.path_gain(topology, rx, tx),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::Link;

    fn params(xi: f64, p: f64, theta: f64, w: f64) -> SystemParams {
        SystemParams::new(0.01, xi, p, 5.0, 3.0, theta, w).unwrap()
    }

    fn config(traffic: Traffic) -> SimConfig {
        SimConfig {
            traffic,
            trace: TraceLevel::Full,
            ..SimConfig::default()
        }
    }

    fn lone_link() -> Topology {
        Topology {
            links: vec![Link {
                tx: [100.0, 100.0],
                rx: [105.0, 100.0],
            }],
            window_side: 240.0,
            margin: 20.0,
        }
    }

    fn build(p: SystemParams, c: SimConfig, t: Topology, seed: u64) -> Network {
        Network::with_topology(p, c, t, Streams::new(seed, 0))
    }

    #[test]
    fn noise_free_lone_link_delivers_in_one_slot() {
        let mut net = build(
            params(0.3, 1.0, 10.0, 0.0),
            config(Traffic::Bernoulli),
            lone_link(),
            1,
        );
        for _ in 0..2000 {
            net.step_slot();
        }
        let st = &net.states()[0];
        assert!(st.delivered.len() > 400);
        assert!(st.delivered.iter().all(|d| d.delay() == 1));
    }

    #[test]
    fn noise_only_success_matches_exponential_tail() {
        // θ·W·r₀^α = 0.125
        let p = params(0.0, 1.0, 1.0, 1e-3);
        let mut net = build(p, config(Traffic::Backlogged), lone_link(), 2);
        let slots = 40_000;
        let ok: u32 = (0..slots).map(|_| net.step_slot().interior_successes).sum();
        let target = (-0.125f64).exp();
        let se = (target * (1.0 - target) / slots as f64).sqrt();
        assert!((ok as f64 / slots as f64 - target).abs() < 4.0 * se);
    }

    #[test]
    fn single_interferer_rayleigh_oracle() {
        // P(h₀ r₀^{−α} > θ h₁ d^{−α}) = 1 / (1 + θ (r₀/d)^α) for unit-mean exponentials.
        let d: f64 = 10.0;
        let topo = Topology {
            links: vec![
                Link {
                    tx: [100.0, 100.0],
                    rx: [105.0, 100.0],
                },
                Link {
                    tx: [105.0, 110.0],
                    rx: [110.0, 110.0],
                },
            ],
            window_side: 240.0,
            margin: 20.0,
        };
        let theta = 2.0;
        let mut net = build(
            params(0.0, 1.0, theta, 0.0),
            config(Traffic::Backlogged),
            topo,
            3,
        );
        let slots = 40_000;
        let mut ok0 = 0u32;
        for _ in 0..slots {
            let tr = net.step_slot().trace.unwrap();
            ok0 += tr.observations[0].sinr_ok as u32;
            assert!(tr.observations[0].interference > 0.0);
        }
        let target = 1.0 / (1.0 + theta * (5.0 / d).powi(3));
        let se = (target * (1.0 - target) / slots as f64).sqrt();
        assert!(
            (ok0 as f64 / slots as f64 - target).abs() < 4.0 * se,
            "{ok0} vs {target}"
        );
    }

    #[test]
    fn mean_interference_equals_path_gain() {
        let topo = Topology {
            links: vec![
                Link {
                    tx: [100.0, 100.0],
                    rx: [105.0, 100.0],
                },
                Link {
                    tx: [105.0, 104.0],
                    rx: [110.0, 104.0],
                },
            ],
            window_side: 240.0,
            margin: 20.0,
        };
        let mut net = build(
            params(0.0, 1.0, 1.0, 0.0),
            config(Traffic::Backlogged),
            topo,
            4,
        );
        let slots = 40_000;
        let sum: f64 = (0..slots)
            .map(|_| net.step_slot().trace.unwrap().observations[0].interference)
            .sum();
        let gain = 4f64.powi(-3);
        // Exp(1) has unit standard deviation
        assert!((sum / slots as f64 / gain - 1.0).abs() < 4.0 / (slots as f64).sqrt());
    }

    #[test]
    fn packets_are_conserved_and_fifo() {
        let c = SimConfig {
            num_slots: 500,
            ..config(Traffic::Bernoulli)
        };
        let mut net = Network::new(params(0.05, 0.5, 10.0, 10f64.powf(-3.3)), c, 0);
        for _ in 0..500 {
            net.step_slot();
        }
        let mut delivered = 0;
        for st in net.states() {
            assert_eq!(st.arrivals as usize, st.delivered.len() + st.queue.len());
            delivered += st.delivered.len();
            for w in st.delivered.windows(2) {
                assert!(w[0].arrival_slot < w[1].arrival_slot);
                assert!(w[0].departure_slot < w[1].departure_slot);
            }
            assert!(st.delivered.iter().all(|d| d.delay() >= 1));
            if let (Some(last), Some(&head)) = (st.delivered.last(), st.queue.front()) {
                assert!(last.arrival_slot < head);
            }
        }
        assert!(delivered > 0);
    }

    #[test]
    fn no_arrivals_means_idle_network() {
        let mut net = Network::new(params(0.0, 0.5, 10.0, 1e-3), config(Traffic::Bernoulli), 0);
        for _ in 0..100 {
            let out = net.step_slot();
            assert!(out.interior_links > 0);
            assert_eq!(out.interior_nonempty, 0);
            assert_eq!(out.interior_attempts, 0);
        }
    }

    #[test]
    fn backlogged_links_are_always_nonempty() {
        let mut net = Network::new(params(0.0, 0.5, 10.0, 1e-3), config(Traffic::Backlogged), 0);
        for _ in 0..50 {
            let out = net.step_slot();
            assert_eq!(out.interior_nonempty, out.interior_links);
            assert!(net.states().iter().all(|s| s.queue.is_empty()));
        }
    }

    #[test]
    fn tracing_does_not_change_the_dynamics() {
        let p = params(0.02, 0.5, 10.0, 10f64.powf(-3.3));
        let off = SimConfig {
            trace: TraceLevel::Off,
            ..SimConfig::default()
        };
        let mut a = Network::new(p, off, 5);
        let mut b = Network::new(p, config(Traffic::Bernoulli), 5);
        for _ in 0..200 {
            let (x, y) = (a.step_slot(), b.step_slot());
            assert_eq!(
                (x.interior_attempts, x.interior_successes),
                (y.interior_attempts, y.interior_successes)
            );
        }
        assert_eq!(a.states(), b.states());
    }

    #[test]
    fn high_mobility_moves_links() {
        let c = SimConfig {
            mobility: Mobility::HighMobility,
            ..SimConfig::default()
        };
        let mut net = Network::new(params(0.01, 0.5, 10.0, 1e-3), c, 0);
        let before = net.topology().clone();
        net.step_slot();
        assert_eq!(net.topology().len(), before.len());
        assert_ne!(net.topology().links, before.links);
        assert_eq!(net.slot(), 1);
    }
}
