//! JSON experiment configuration.
//!
//! θ is given as `theta_db` or `theta_linear` and W as `noise_W` or
//! `noise_log10`; both are converted to linear values once, here. Omitted
//! fields fall back to the reference setup below.

use std::path::Path;

use msa_core::sim::{Mobility, SimConfig, TraceLevel, Traffic};
use msa_core::{db_to_linear, MsaThresholds, SystemParams};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// λ = 0.01, ξ = 0.01, p = 0.5, r₀ = 5, α = 3, θ = 10 dB, W = 10^−3.3.
pub fn reference_params() -> SystemParams {
    SystemParams::new(
        0.01,
        0.01,
        0.5,
        5.0,
        3.0,
        db_to_linear(10.0),
        10f64.powf(-3.3),
    )
    .expect("valid reference")
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawParams {
    pub density_lambda: Option<f64>,
    pub arrival_rate_xi: Option<f64>,
    pub transmit_prob_p: Option<f64>,
    pub link_distance_r0: Option<f64>,
    pub pathloss_alpha: Option<f64>,
    pub theta_db: Option<f64>,
    pub theta_linear: Option<f64>,
    #[serde(rename = "noise_W")]
    pub noise_w: Option<f64>,
    pub noise_log10: Option<f64>,
}

impl RawParams {
    pub fn resolve(&self) -> Result<SystemParams, CliError> {
        let base = reference_params();
        let theta = match (self.theta_db, self.theta_linear) {
            (Some(_), Some(_)) => {
                return Err(config_err(
                    "params.theta_db",
                    "give theta_db or theta_linear, not both",
                ))
            }
            (Some(db), None) => db_to_linear(db),
            (None, Some(lin)) => lin,
            (None, None) => base.sinr_threshold_theta,
        };
        let noise = match (self.noise_w, self.noise_log10) {
            (Some(_), Some(_)) => {
                return Err(config_err(
                    "params.noise_W",
                    "give noise_W or noise_log10, not both",
                ))
            }
            (Some(w), None) => w,
            (None, Some(l)) => 10f64.powf(l),
            (None, None) => base.noise_w,
        };
        SystemParams::new(
            self.density_lambda.unwrap_or(base.density_lambda),
            self.arrival_rate_xi.unwrap_or(base.arrival_rate_xi),
            self.transmit_prob_p.unwrap_or(base.transmit_prob_p),
            self.link_distance_r0.unwrap_or(base.link_distance_r0),
            self.pathloss_alpha.unwrap_or(base.pathloss_alpha),
            theta,
            noise,
        )
        .map_err(|e| CliError::Config(format!("params: {e}")))
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawThresholds {
    pub epsilon: f64,
    pub beta: f64,
    pub eta: f64,
}

impl Default for RawThresholds {
    fn default() -> Self {
        RawThresholds {
            epsilon: 0.1,
            beta: 50.0,
            eta: 0.5,
        }
    }
}

/// Simulation settings. Defaults to 50 realizations × 1000 slots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawSim {
    pub window_side: f64,
    pub margin: f64,
    pub num_realizations: usize,
    pub num_slots: usize,
    pub mobility: Mobility,
    pub traffic: Traffic,
    pub seed: u64,
    pub warmup: usize,
    pub lag: usize,
}

impl Default for RawSim {
    fn default() -> Self {
        let c = SimConfig::default();
        RawSim {
            window_side: c.window_side,
            margin: c.margin,
            num_realizations: 50,
            num_slots: 1000,
            mobility: c.mobility,
            traffic: c.traffic,
            seed: 0,
            warmup: 0,
            lag: 1,
        }
    }
}

impl RawSim {
    pub fn sim_config(&self) -> Result<SimConfig, CliError> {
        if self.warmup >= self.num_slots {
            return Err(config_err("sim.warmup", "must be smaller than num_slots"));
        }
        if self.lag == 0 {
            return Err(config_err("sim.lag", "must be at least 1"));
        }
        let trace = if self.traffic == Traffic::Backlogged {
            TraceLevel::Full
        } else {
            TraceLevel::Off
        };
        SimConfig {
            window_side: self.window_side,
            margin: self.margin,
            num_realizations: self.num_realizations,
            num_slots: self.num_slots,
            mobility: self.mobility,
            traffic: self.traffic,
            seed: self.seed,
            trace,
        }
        .validate()
        .map_err(|e| CliError::Config(format!("sim: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVar {
    Alpha,
    Xi,
    Lambda,
    P,
    #[serde(rename = "W")]
    W,
    /// p·λ with p held at its base value.
    PLambda,
}

impl SweepVar {
    pub fn column(self) -> &'static str {
        match self {
            SweepVar::Alpha => "alpha",
            SweepVar::Xi => "xi",
            SweepVar::Lambda => "lambda",
            SweepVar::P => "p",
            SweepVar::W => "W",
            SweepVar::PLambda => "p_lambda",
        }
    }

    pub fn apply(self, base: SystemParams, value: f64) -> Result<SystemParams, CliError> {
        let p = match self {
            SweepVar::Alpha => base.with_alpha(value),
            SweepVar::Xi => base.with_xi(value),
            SweepVar::Lambda => base.with_lambda(value),
            SweepVar::P => base.with_p(value),
            SweepVar::W => base.with_noise(value),
            SweepVar::PLambda => base.with_lambda(value / base.transmit_prob_p),
        };
        msa_core::validate_params(p)
            .map_err(|e| CliError::Config(format!("sweep {} = {value}: {e}", self.column())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub variable: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl Sweep {
    pub fn validate(self) -> Result<Self, CliError> {
        if self.points < 2 {
            return Err(config_err("sweep.points", "must be at least 2"));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(config_err("sweep.start", "start and stop must be finite"));
        }
        if self.scale == Scale::Log && !(self.start > 0.0 && self.stop > 0.0) {
            return Err(config_err(
                "sweep.scale",
                "log grids need positive start and stop",
            ));
        }
        Ok(self)
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    return self.stop;
                }
                let f = i as f64 / last;
                match self.scale {
                    Scale::Linear => self.start + f * (self.stop - self.start),
                    Scale::Log => self.start * (self.stop / self.start).powf(f),
                }
            })
            .collect()
    }

    /// Parses `start:stop:points`.
    pub fn parse_range(variable: SweepVar, text: &str) -> Result<Sweep, CliError> {
        let parts: Vec<&str> = text.split(':').collect();
        let bad = || config_err("--alpha-sweep", "expected start:stop:points");
        if parts.len() != 3 {
            return Err(bad());
        }
        let start = parts[0].trim().parse().map_err(|_| bad())?;
        let stop = parts[1].trim().parse().map_err(|_| bad())?;
        let points = parts[2].trim().parse().map_err(|_| bad())?;
        Sweep {
            variable,
            start,
            stop,
            points,
            scale: Scale::Linear,
        }
        .validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outputs {
    Analytics,
    Simulation,
    #[default]
    Both,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawExperiment {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub params: RawParams,
    #[serde(default)]
    pub thresholds: RawThresholds,
    #[serde(default)]
    pub sim: RawSim,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    #[serde(default)]
    pub outputs: Outputs,
}

/// A fully resolved experiment: linear θ and W, validated values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Experiment {
    pub name: String,
    pub params: SystemParams,
    pub thresholds: MsaThresholds,
    pub sim: RawSim,
    pub sweep: Option<Sweep>,
    pub outputs: Outputs,
}

impl Experiment {
    pub fn from_json(text: &str) -> Result<Experiment, CliError> {
        let raw: RawExperiment =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))?;
        Experiment::from_raw(raw)
    }

    pub fn from_path(path: &Path) -> Result<Experiment, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Experiment::from_json(&text)
    }

    pub fn from_raw(raw: RawExperiment) -> Result<Experiment, CliError> {
        let t = raw.thresholds;
        let thresholds = MsaThresholds::new(t.epsilon, t.beta, t.eta)
            .map_err(|e| CliError::Config(format!("thresholds: {e}")))?;
        let sweep = raw.sweep.map(Sweep::validate).transpose()?;
        let exp = Experiment {
            name: raw.name.unwrap_or_else(|| "experiment".to_string()),
            params: raw.params.resolve()?,
            thresholds,
            sim: raw.sim,
            sweep,
            outputs: raw.outputs,
        };
        exp.sim.sim_config()?;
        Ok(exp)
    }

    /// Parameter sets of the sweep, or the base alone.
    pub fn points(&self) -> Result<Vec<(Option<f64>, SystemParams)>, CliError> {
        match &self.sweep {
            None => Ok(vec![(None, self.params)]),
            Some(s) => s
                .values()
                .into_iter()
                .map(|v| Ok((Some(v), s.variable.apply(self.params, v)?)))
                .collect(),
        }
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("experiment serializes")
    }
}

fn config_err(field: &str, msg: &str) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_the_reference_setup() {
        let e = Experiment::from_json("{}").unwrap();
        assert_eq!(e.params.sinr_threshold_theta, 10.0);
        assert!((e.params.noise_w - 10f64.powf(-3.3)).abs() < 1e-18);
        assert_eq!(e.params.pathloss_alpha, 3.0);
        assert_eq!((e.sim.num_realizations, e.sim.num_slots), (50, 1000));
        assert_eq!(e.thresholds.delay_ceiling_beta, 50.0);
    }

    #[test]
    fn theta_and_noise_forms() {
        let e =
            Experiment::from_json(r#"{"params": {"theta_linear": 2.5, "noise_W": 1e-4}}"#).unwrap();
        assert_eq!(
            (e.params.sinr_threshold_theta, e.params.noise_w),
            (2.5, 1e-4)
        );
        let e = Experiment::from_json(r#"{"params": {"theta_db": 0, "noise_log10": -4}}"#).unwrap();
        assert_eq!(e.params.sinr_threshold_theta, 1.0);
        assert!((e.params.noise_w - 1e-4).abs() < 1e-19);
    }

    #[test]
    fn errors_name_the_field() {
        let cases = [
            (
                r#"{"params": {"theta_db": 10, "theta_linear": 10}}"#,
                "theta_db",
            ),
            (
                r#"{"params": {"noise_W": 0.1, "noise_log10": -1}}"#,
                "noise_W",
            ),
            (r#"{"params": {"pathloss_alpha": 2}}"#, "pathloss_alpha"),
            (r#"{"params": {"arrival_rate_xi": 1.5}}"#, "arrival_rate_xi"),
            (r#"{"thresholds": {"beta": 0.5}}"#, "delay_ceiling_beta"),
            (
                r#"{"sweep": {"variable": "alpha", "start": 3, "stop": 4, "points": 1}}"#,
                "sweep.points",
            ),
            (
                r#"{"sweep": {"variable": "W", "start": 0, "stop": 1, "points": 3, "scale": "log"}}"#,
                "sweep.scale",
            ),
            (r#"{"sim": {"margin": 200}}"#, "window_side"),
            (r#"{"sim": {"warmup": 1000}}"#, "sim.warmup"),
            (r#"{"params": {"lambda": 1}}"#, "unknown field"),
        ];
        for (json, field) in cases {
            match Experiment::from_json(json) {
                Err(CliError::Config(msg)) => assert!(msg.contains(field), "{msg} lacks {field}"),
                other => panic!("{json}: {other:?}"),
            }
        }
    }

    #[test]
    fn sweep_grids() {
        let s = Sweep {
            variable: SweepVar::Alpha,
            start: 2.0,
            stop: 4.0,
            points: 5,
            scale: Scale::Linear,
        };
        assert_eq!(s.values(), vec![2.0, 2.5, 3.0, 3.5, 4.0]);
        let s = Sweep {
            variable: SweepVar::W,
            start: 1e-6,
            stop: 1e-2,
            points: 5,
            scale: Scale::Log,
        };
        for (v, e) in s.values().iter().zip([1e-6, 1e-5, 1e-4, 1e-3, 1e-2]) {
            assert!((v / e - 1.0).abs() < 1e-12);
        }
        let s = Sweep::parse_range(SweepVar::Alpha, "2.05:4:40").unwrap();
        assert_eq!(s.values().len(), 40);
        assert!(Sweep::parse_range(SweepVar::Alpha, "2:4").is_err());
    }

    #[test]
    fn sweep_points_respect_invariants() {
        let e = Experiment::from_json(
            r#"{"sweep": {"variable": "alpha", "start": 1.5, "stop": 3, "points": 4}}"#,
        )
        .unwrap();
        assert!(matches!(e.points(), Err(CliError::Config(m)) if m.contains("pathloss_alpha")));
        let e = Experiment::from_json(
            r#"{"sweep": {"variable": "p_lambda", "start": 0.001, "stop": 0.002, "points": 2}}"#,
        )
        .unwrap();
        let pts = e.points().unwrap();
        assert!((pts[1].1.density_lambda - 0.004).abs() < 1e-15);
    }

    #[test]
    fn canonical_json_is_stable() {
        let a =
            Experiment::from_json(r#"{"params": {"theta_db": 10}, "sim": {"seed": 3}}"#).unwrap();
        let b = Experiment::from_json(r#"{"sim": {"seed": 3}}"#).unwrap();
        assert_eq!(a.canonical_json(), b.canonical_json());
        assert!(a.canonical_json().contains("\"noise_W\""));
    }
}
