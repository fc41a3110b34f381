//! Physical and protocol parameters of the bipolar network, the design
//! thresholds that delimit massive and sporadic access, and the result
//! bundle of the high-mobility stationary analysis.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::special::gamma_reflection_product;

/// A violated parameter invariant. Each variant names the field and bound.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("density_lambda must be positive and finite (got {0})")]
    Density(f64),
    #[error("arrival_rate_xi must lie in [0,1] (got {0})")]
    ArrivalRate(f64),
    #[error("transmit_prob_p must lie in (0,1] (got {0})")]
    TransmitProb(f64),
    #[error("link_distance_r0 must be positive and finite (got {0})")]
    LinkDistance(f64),
    #[error("pathloss_alpha must exceed 2 (got {0})")]
    PathLoss(f64),
    #[error("sinr_threshold_theta must be positive and finite (got {0})")]
    SinrThreshold(f64),
    #[error("noise_W must be non-negative and finite (got {0})")]
    Noise(f64),
    #[error("success_floor_epsilon must be positive (got {0})")]
    SuccessFloor(f64),
    #[error("delay_ceiling_beta must exceed 1 (got {0})")]
    DelayCeiling(f64),
    #[error("regime_ratio_eta must lie in (0,1] (got {0})")]
    RegimeRatio(f64),
}

/// Converts a decibel value to a linear power ratio.
pub fn db_to_linear(value_db: f64) -> f64 {
    10f64.powf(value_db / 10.0)
}

/// The seven scalars shared by every link of the network.
///
/// `sinr_threshold_theta` is linear, never dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub density_lambda: f64,
    pub arrival_rate_xi: f64,
    pub transmit_prob_p: f64,
    pub link_distance_r0: f64,
    pub pathloss_alpha: f64,
    pub sinr_threshold_theta: f64,
    #[serde(rename = "noise_W")]
    pub noise_w: f64,
}

impl SystemParams {
    /// Validating constructor.
    pub fn new(
        density_lambda: f64,
        arrival_rate_xi: f64,
        transmit_prob_p: f64,
        link_distance_r0: f64,
        pathloss_alpha: f64,
        sinr_threshold_theta: f64,
        noise_w: f64,
    ) -> Result<Self, ParamError> {
        validate_params(SystemParams {
            density_lambda,
            arrival_rate_xi,
            transmit_prob_p,
            link_distance_r0,
            pathloss_alpha,
            sinr_threshold_theta,
            noise_w,
        })
    }

    pub fn derived(&self) -> DerivedConstants {
        derive_constants(self)
    }

    /// θ·W·r₀^α, the exponent of the noise-only success probability.
    pub fn noise_exponent(&self) -> f64 {
        self.sinr_threshold_theta * self.noise_w * self.link_distance_r0.powf(self.pathloss_alpha)
    }

    /// ξ·λ.
    pub fn traffic_factor(&self) -> f64 {
        self.arrival_rate_xi * self.density_lambda
    }

    pub fn with_alpha(self, pathloss_alpha: f64) -> Self {
        SystemParams {
            pathloss_alpha,
            ..self
        }
    }

    pub fn with_xi(self, arrival_rate_xi: f64) -> Self {
        SystemParams {
            arrival_rate_xi,
            ..self
        }
    }

    pub fn with_lambda(self, density_lambda: f64) -> Self {
        SystemParams {
            density_lambda,
            ..self
        }
    }

    pub fn with_p(self, transmit_prob_p: f64) -> Self {
        SystemParams {
            transmit_prob_p,
            ..self
        }
    }

    pub fn with_noise(self, noise_w: f64) -> Self {
        SystemParams { noise_w, ..self }
    }
}

/// Checks every invariant of [`SystemParams`] and returns the values unchanged.
pub fn validate_params(raw: SystemParams) -> Result<SystemParams, ParamError> {
    let finite_pos = |v: f64| v.is_finite() && v > 0.0;
    if !finite_pos(raw.density_lambda) {
        return Err(ParamError::Density(raw.density_lambda));
    }
    if !(0.0..=1.0).contains(&raw.arrival_rate_xi) {
        return Err(ParamError::ArrivalRate(raw.arrival_rate_xi));
    }
    if !(raw.transmit_prob_p > 0.0 && raw.transmit_prob_p <= 1.0) {
        return Err(ParamError::TransmitProb(raw.transmit_prob_p));
    }
    if !finite_pos(raw.link_distance_r0) {
        return Err(ParamError::LinkDistance(raw.link_distance_r0));
    }
    if !(raw.pathloss_alpha > 2.0 && raw.pathloss_alpha.is_finite()) {
        return Err(ParamError::PathLoss(raw.pathloss_alpha));
    }
    if !finite_pos(raw.sinr_threshold_theta) {
        return Err(ParamError::SinrThreshold(raw.sinr_threshold_theta));
    }
    if !(raw.noise_w >= 0.0 && raw.noise_w.is_finite()) {
        return Err(ParamError::Noise(raw.noise_w));
    }
    Ok(raw)
}

/// Constants every closed form is written in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedConstants {
    /// δ = 2/α.
    pub delta: f64,
    /// C₀ = π θ^δ r₀² Γ(1+δ)Γ(1−δ), in area units.
    pub c0: f64,
    /// θ·W·r₀^α.
    pub noise_exponent: f64,
}

pub fn derive_constants(params: &SystemParams) -> DerivedConstants {
    let delta = 2.0 / params.pathloss_alpha;
    // α > 2 keeps δ inside (0,1), the only place the product can fail.
    let reflection = gamma_reflection_product(delta).expect("alpha > 2 implies delta in (0,1)");
    let c0 = std::f64::consts::PI
        * params.sinr_threshold_theta.powf(delta)
        * params.link_distance_r0.powi(2)
        * reflection;
    DerivedConstants {
        delta,
        c0,
        noise_exponent: params.noise_exponent(),
    }
}

/// Design targets: success floor ε, delay ceiling β and regime ratio η.
///
/// Only the parameter-free bounds are checked here; the windows that depend
/// on θWr₀^α are enforced by the analytics that use them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MsaThresholds {
    #[serde(rename = "epsilon")]
    pub success_floor_epsilon: f64,
    #[serde(rename = "beta")]
    pub delay_ceiling_beta: f64,
    #[serde(rename = "eta")]
    pub regime_ratio_eta: f64,
}

impl MsaThresholds {
    pub fn new(epsilon: f64, beta: f64, eta: f64) -> Result<Self, ParamError> {
        let t = MsaThresholds {
            success_floor_epsilon: epsilon,
            delay_ceiling_beta: beta,
            regime_ratio_eta: eta,
        };
        t.validate()
    }

    pub fn validate(self) -> Result<Self, ParamError> {
        if !(self.success_floor_epsilon > 0.0 && self.success_floor_epsilon < 1.0) {
            return Err(ParamError::SuccessFloor(self.success_floor_epsilon));
        }
        if !(self.delay_ceiling_beta > 1.0) {
            return Err(ParamError::DelayCeiling(self.delay_ceiling_beta));
        }
        if !(self.regime_ratio_eta > 0.0 && self.regime_ratio_eta <= 1.0) {
            return Err(ParamError::RegimeRatio(self.regime_ratio_eta));
        }
        Ok(self)
    }
}

/// A quantity that is either a finite number or unbounded (an unstable queue).
///
/// Displays as the number or as the literal `inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaybeInfinite {
    Finite(f64),
    Infinite,
}

impl MaybeInfinite {
    pub fn finite(self) -> Option<f64> {
        match self {
            MaybeInfinite::Finite(v) => Some(v),
            MaybeInfinite::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, MaybeInfinite::Infinite)
    }
}

impl fmt::Display for MaybeInfinite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaybeInfinite::Finite(v) => write!(f, "{v}"),
            MaybeInfinite::Infinite => f.write_str("inf"),
        }
    }
}

/// Why a high-mobility stationary solution is (or is not) stable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    /// The fixed point has no real solution: −ξλC₀e^{θWr₀^α} < −1/e.
    NoFixedPoint,
    /// The fixed point exists but the non-empty probability exceeds one.
    NonemptyExceedsOne,
    /// ξ ≥ p·P₀: arrivals outpace the service rate.
    ServiceRateExceeded,
}

impl Stability {
    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::NoFixedPoint => "no_fixed_point",
            Stability::NonemptyExceedsOne => "nonempty_exceeds_one",
            Stability::ServiceRateExceeded => "service_rate_exceeded",
        }
    }
}

/// The high-mobility stationary solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryMetrics {
    /// ζ₀. Saturated to 1 when no fixed point exists.
    pub nonempty_prob_zeta0: f64,
    /// P₀. Equals the backlogged success probability when no fixed point exists.
    pub success_prob_p0: f64,
    pub mean_delay_d0: MaybeInfinite,
    pub mean_queue_len_l0: MaybeInfinite,
    pub stability: Stability,
}

impl StationaryMetrics {
    pub fn stable(&self) -> bool {
        self.stability == Stability::Stable
    }
}
