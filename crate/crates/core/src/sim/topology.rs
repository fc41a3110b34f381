use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::SimConfig;
use crate::params::SystemParams;

/// One transmitter and its receiver, `r0` apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub tx: [f64; 2],
    pub rx: [f64; 2],
}

impl Link {
    fn place<R: Rng + ?Sized>(rng: &mut R, side: f64, r0: f64) -> Link {
        let tx = [rng.random::<f64>() * side, rng.random::<f64>() * side];
        let angle = rng.random::<f64>() * TAU;
        Link {
            tx,
            rx: [tx[0] + r0 * angle.cos(), tx[1] + r0 * angle.sin()],
        }
    }
}

/// Bipolar links inside a square window `[0, window_side]²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub links: Vec<Link>,
    pub window_side: f64,
    pub margin: f64,
}

impl Topology {
    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    /// Whether link `i` has its transmitter at least `margin` from every edge.
    pub fn is_interior(&self, i: usize) -> bool {
        let [x, y] = self.links[i].tx;
        let hi = self.window_side - self.margin;
        x >= self.margin && x <= hi && y >= self.margin && y <= hi
    }

    pub fn interior_links(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_interior(i)).collect()
    }

    /// Moves every tx–rx pair rigidly to a fresh uniform position and orientation.
    pub fn resample_positions<R: Rng + ?Sized>(&mut self, r0: f64, rng: &mut R) {
        let side = self.window_side;
        for link in &mut self.links {
            *link = Link::place(rng, side, r0);
        }
    }
}

/// Draws N ~ Poisson(λ·side²) links with uniform transmitters and receivers
/// at distance r₀ in a uniform direction.
pub fn sample_topology<R: Rng + ?Sized>(
    params: &SystemParams,
    config: &SimConfig,
    rng: &mut R,
) -> Topology {
    let side = config.window_side;
    let mean = params.density_lambda * side * side;
    let count = Poisson::new(mean)
        .map(|d| d.sample(rng) as usize)
        .unwrap_or(0);
    let links = (0..count)
        .map(|_| Link::place(rng, side, params.link_distance_r0))
        .collect();
    Topology {
        links,
        window_side: side,
        margin: config.margin,
    }
}
