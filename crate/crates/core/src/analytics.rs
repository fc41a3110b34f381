//! Closed-form results for massive and sporadic access: the MSA region,
//! interference/noise regime boundaries, temporal correlations in the
//! backlogged network and the high-mobility stationary solution.

use serde::Serialize;
use thiserror::Error;

use crate::params::{MaybeInfinite, MsaThresholds, Stability, StationaryMetrics, SystemParams};
use crate::special::{lambert_w0, solve_bracketed_root, MathError, NumericTolerances};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticsError {
    #[error(
        "success floor epsilon = {epsilon} must lie in (0, {limit}) = (0, exp(-theta W r0^alpha))"
    )]
    SuccessFloorWindow { epsilon: f64, limit: f64 },
    #[error("delay ceiling beta = {beta} must exceed exp(theta W r0^alpha) = {limit}")]
    DelayCeilingWindow { beta: f64, limit: f64 },
    #[error("correlation is undefined for p*lambda = {0}")]
    ZeroActivity(f64),
    #[error(transparent)]
    Math(#[from] MathError),
}

/// Success probability of an active link facing a PPP of interferers with
/// the given density: exp(−density·C₀ − θWr₀^α).
pub fn success_prob_poisson(active_density: f64, params: &SystemParams) -> f64 {
    let d = params.derived();
    (-active_density * d.c0 - d.noise_exponent).exp()
}

/// Mean sojourn time (slots) of a discrete-time Geo/Geo/1 queue,
/// (1−ξ)/(μ−ξ), or infinite when ξ ≥ μ.
pub fn geo_geo1_mean_delay(xi: f64, mu: f64) -> MaybeInfinite {
    if xi < mu {
        MaybeInfinite::Finite((1.0 - xi) / (mu - xi))
    } else {
        MaybeInfinite::Infinite
    }
}

/// λ₀: the smallest density at which even a fully backlogged network fails
/// the success floor ε.
pub fn massive_threshold(
    params: &SystemParams,
    thresholds: &MsaThresholds,
) -> Result<f64, AnalyticsError> {
    let d = params.derived();
    let eps = thresholds.success_floor_epsilon;
    let limit = (-d.noise_exponent).exp();
    if !(eps > 0.0 && eps < limit) {
        return Err(AnalyticsError::SuccessFloorWindow {
            epsilon: eps,
            limit,
        });
    }
    Ok(-(d.noise_exponent + eps.ln()) / d.c0)
}

/// ξ₀: the largest arrival rate an interference-free link serves within the
/// delay ceiling β.
pub fn sporadic_threshold(
    params: &SystemParams,
    thresholds: &MsaThresholds,
) -> Result<f64, AnalyticsError> {
    let n = params.noise_exponent();
    let beta = thresholds.delay_ceiling_beta;
    let limit = n.exp();
    if !(beta > limit) {
        return Err(AnalyticsError::DelayCeilingWindow { beta, limit });
    }
    Ok((beta * (-n).exp() - 1.0) / (beta - 1.0))
}

/// The (λ₀, ξ₀) corner of the MSA region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MsaRegion {
    pub lambda0: f64,
    pub xi0: f64,
}

impl MsaRegion {
    /// A point is massive and sporadic iff λ ≥ λ₀ and ξ ≤ ξ₀.
    pub fn contains(&self, lambda: f64, xi: f64) -> bool {
        lambda >= self.lambda0 && xi <= self.xi0
    }
}

pub fn msa_region(
    params: &SystemParams,
    thresholds: &MsaThresholds,
) -> Result<MsaRegion, AnalyticsError> {
    Ok(MsaRegion {
        lambda0: massive_threshold(params, thresholds)?,
        xi0: sporadic_threshold(params, thresholds)?,
    })
}

/// Minimum traffic factor ξλ for which the interference-only to noise-only
/// success ratio drops to η (no retransmissions, activity pξ).
pub fn interference_limited_boundary(params: &SystemParams, thresholds: &MsaThresholds) -> f64 {
    let d = params.derived();
    (d.noise_exponent - thresholds.regime_ratio_eta.ln()) / (params.transmit_prob_p * d.c0)
}

/// Maximum traffic factor ξλ for which the noise-only to interference-only
/// success ratio stays below η. Zero when θWr₀^α + ln η ≤ 0, i.e. no
/// noise-limited regime exists.
pub fn noise_limited_boundary(params: &SystemParams, thresholds: &MsaThresholds) -> f64 {
    let d = params.derived();
    let num = d.noise_exponent + thresholds.regime_ratio_eta.ln();
    if num <= 0.0 {
        return 0.0;
    }
    num / (d.c0 * d.noise_exponent.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeKind {
    InterferenceLimited,
    NoiseLimited,
    /// Between the two boundaries.
    Intermediate,
}

impl RegimeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RegimeKind::InterferenceLimited => "interference_limited",
            RegimeKind::NoiseLimited => "noise_limited",
            RegimeKind::Intermediate => "intermediate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeClass {
    pub kind: RegimeKind,
    pub traffic_factor: f64,
}

pub fn classify_regime(params: &SystemParams, thresholds: &MsaThresholds) -> RegimeClass {
    let traffic_factor = params.traffic_factor();
    let noise_region_exists = params.noise_exponent() + thresholds.regime_ratio_eta.ln() > 0.0;
    let kind = if traffic_factor >= interference_limited_boundary(params, thresholds) {
        RegimeKind::InterferenceLimited
    } else if noise_region_exists && traffic_factor <= noise_limited_boundary(params, thresholds) {
        RegimeKind::NoiseLimited
    } else {
        RegimeKind::Intermediate
    };
    RegimeClass {
        kind,
        traffic_factor,
    }
}

/// Temporal correlation coefficient of the interference under Rayleigh
/// fading, p/E[h²] = p/2. Does not depend on the density.
pub fn interference_correlation(p: f64) -> f64 {
    p / 2.0
}

/// Per-slot success probability of a link in the backlogged network.
pub fn backlogged_success_prob(params: &SystemParams) -> f64 {
    success_prob_poisson(params.transmit_prob_p * params.density_lambda, params)
}

/// Two-slot joint success probability of the backlogged network,
/// exp(−2θWr₀^α − pλ·2^δ·C₀).
pub fn joint_success_prob(params: &SystemParams) -> f64 {
    let d = params.derived();
    let pl = params.transmit_prob_p * params.density_lambda;
    (-2.0 * d.noise_exponent - pl * 2f64.powf(d.delta) * d.c0).exp()
}

/// Two-slot joint success probability when interferer activity and fading
/// are drawn independently in each slot:
/// exp(−2θWr₀^α − λC₀(2p − p²(1−δ))).
///
/// Only interferers active in both slots couple the two outcomes; each
/// contributes E[1/(1+u)²] = 1 − δ relative to a fresh draw, where
/// u = θ(r₀/d)^α.
pub fn joint_success_prob_resampled(params: &SystemParams) -> f64 {
    let d = params.derived();
    let p = params.transmit_prob_p;
    let coupling = 2.0 * p - p * p * (1.0 - d.delta);
    (-2.0 * d.noise_exponent - params.density_lambda * d.c0 * coupling).exp()
}

/// Success-indicator correlation matching [`joint_success_prob_resampled`]:
/// [e^{p²(1−δ)λC₀} − 1] / [e^{θWr₀^α + pλC₀} − 1].
pub fn success_correlation_resampled(params: &SystemParams) -> Result<f64, AnalyticsError> {
    let pl = params.transmit_prob_p * params.density_lambda;
    if !(pl > 0.0) {
        return Err(AnalyticsError::ZeroActivity(pl));
    }
    let d = params.derived();
    let num = params.transmit_prob_p * pl * (1.0 - d.delta) * d.c0;
    let m = d.noise_exponent + pl * d.c0;
    Ok((num - m).exp() * (-num).exp_m1() / (-m).exp_m1())
}

/// Pearson correlation of the success indicators in two slots:
/// [e^{(2−2^δ)pλC₀} − 1] / [e^{θWr₀^α + pλC₀} − 1].
pub fn success_correlation(params: &SystemParams) -> Result<f64, AnalyticsError> {
    let pl = params.transmit_prob_p * params.density_lambda;
    if !(pl > 0.0) {
        return Err(AnalyticsError::ZeroActivity(pl));
    }
    let d = params.derived();
    Ok(success_correlation_at(pl * d.c0, d.delta, d.noise_exponent))
}

/// Same as [`success_correlation`] written in x = pλC₀.
pub fn success_correlation_at(x: f64, delta: f64, noise_exponent: f64) -> f64 {
    let a = 2.0 - 2f64.powf(delta);
    let m = noise_exponent + x;
    // Factored so that neither exponential overflows for large x.
    (a * x - m).exp() * (-a * x).exp_m1() / (-m).exp_m1()
}

/// Location of the correlation maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationPeak {
    /// t₀ = exp(pλ*·C₀).
    pub t0: f64,
    /// pλ*.
    pub p_lambda: f64,
    /// ρ(S_i, S_j) at pλ*.
    pub rho: f64,
}

/// Numerator of the derivative of (tᵃ − 1)/(t − b); decreasing for t > 1.
pub fn correlation_slope_numerator(t: f64, a: f64, b: f64) -> f64 {
    (a - 1.0) * t.powf(a) - a * b * t.powf(a - 1.0) + 1.0
}

/// The pλ that maximizes the success correlation.
///
/// Solves (a−1)t₀ᵃ − a·b·t₀ᵃ⁻¹ + 1 = 0 on t > 1 with a = 2 − 2^δ and
/// b = e^{−θWr₀^α}. The bracket starts at [1+10⁻⁶, 2] and its upper end
/// doubles until the numerator changes sign (at most up to 2⁶⁴). With
/// W = 0 the numerator is negative on all of t > 1 and the supremum sits
/// at pλ → 0, reported as a bracket error.
pub fn max_correlation_point(params: &SystemParams) -> Result<CorrelationPeak, AnalyticsError> {
    let d = params.derived();
    let a = 2.0 - 2f64.powf(d.delta);
    let b = (-d.noise_exponent).exp();
    let g = |t: f64| correlation_slope_numerator(t, a, b);

    let lo = 1.0 + 1e-6;
    let mut hi = 2.0f64;
    while g(hi) > 0.0 {
        hi *= 2.0;
        if hi > 2f64.powi(64) {
            return Err(MathError::Convergence {
                what: "max_correlation_point bracket",
                iterations: 64,
            }
            .into());
        }
    }
    let tol = NumericTolerances {
        residual_tol: 1e-13,
        max_iterations: 200,
    };
    let t0 = solve_bracketed_root(g, lo, hi, tol)?;
    let x = t0.ln();
    Ok(CorrelationPeak {
        t0,
        p_lambda: x / d.c0,
        rho: success_correlation_at(x, d.delta, d.noise_exponent),
    })
}

/// Limit of pλ* as W → ∞: −ln(2^δ − 1) / ((2 − 2^δ)C₀).
pub fn max_correlation_point_noise_limit(params: &SystemParams) -> f64 {
    let d = params.derived();
    let two_delta = 2f64.powf(d.delta);
    -(two_delta - 1.0).ln() / ((2.0 - two_delta) * d.c0)
}

/// High-mobility stationary solution via the principal Lambert W branch.
///
/// ζ₀ = −W₀(z)/(pλC₀) and P₀ = exp(W₀(z) − θWr₀^α) with
/// z = −ξλC₀e^{θWr₀^α}. Stability requires a real fixed point, ζ₀ ≤ 1 and
/// ξ < p·P₀; the first failing condition is reported. When no fixed point
/// exists every queue is saturated, so ζ₀ = 1 and P₀ is the backlogged
/// success probability.
pub fn stationary_solution(params: &SystemParams) -> StationaryMetrics {
    let d = params.derived();
    let p = params.transmit_prob_p;
    let xi = params.arrival_rate_xi;
    let z = -xi * params.density_lambda * d.c0 * d.noise_exponent.exp();

    let unstable = |zeta0: f64, p0: f64, stability| StationaryMetrics {
        nonempty_prob_zeta0: zeta0,
        success_prob_p0: p0,
        mean_delay_d0: MaybeInfinite::Infinite,
        mean_queue_len_l0: MaybeInfinite::Infinite,
        stability,
    };

    let w = match lambert_w0(z) {
        Ok(w) => w,
        Err(_) => {
            return unstable(
                1.0,
                backlogged_success_prob(params),
                Stability::NoFixedPoint,
            )
        }
    };
    let zeta0 = -w / (p * params.density_lambda * d.c0);
    let p0 = (w - d.noise_exponent).exp();
    if zeta0 > 1.0 {
        return unstable(zeta0, p0, Stability::NonemptyExceedsOne);
    }
    let service = p * p0;
    if xi >= service {
        return unstable(zeta0, p0, Stability::ServiceRateExceeded);
    }
    let delay = (1.0 - xi) / (service - xi);
    StationaryMetrics {
        nonempty_prob_zeta0: zeta0,
        success_prob_p0: p0,
        mean_delay_d0: MaybeInfinite::Finite(delay),
        mean_queue_len_l0: MaybeInfinite::Finite(xi * delay),
        stability: Stability::Stable,
    }
}
