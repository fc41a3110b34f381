use msa_core::analytics::{
    backlogged_success_prob, classify_regime, interference_correlation,
    interference_limited_boundary, joint_success_prob, max_correlation_point,
    max_correlation_point_noise_limit, msa_region, noise_limited_boundary, stationary_solution,
    success_correlation, AnalyticsError,
};
use msa_core::sim::run_simulation;
use msa_core::special::MathError;
use msa_core::stats::summarize;

use crate::config::{Experiment, Outputs, SweepVar};
use crate::output::{Cell, Table};
use crate::CliError;

fn analytics_err(e: AnalyticsError) -> CliError {
    match e {
        AnalyticsError::SuccessFloorWindow { .. } | AnalyticsError::DelayCeilingWindow { .. } => {
            CliError::Config(format!("thresholds: {e}"))
        }
        _ => CliError::Numeric(e.to_string()),
    }
}

fn with_var(exp: &Experiment, rest: &[&str]) -> Table {
    let lead = exp.sweep.map(|s| s.variable.column());
    Table::new(lead.into_iter().chain(rest.iter().copied()))
}

fn lead_cell(value: Option<f64>) -> Vec<Cell> {
    value.map(Cell::Num).into_iter().collect()
}

/// λ₀ and ξ₀ at each point.
pub fn region(exp: &Experiment) -> Result<Table, CliError> {
    let mut t = with_var(exp, &["lambda0", "xi0"]);
    for (v, p) in exp.points()? {
        let r = msa_region(&p, &exp.thresholds).map_err(analytics_err)?;
        let mut row = lead_cell(v);
        row.extend([r.lambda0.into(), r.xi0.into()]);
        t.push(row);
    }
    Ok(t)
}

/// Regime boundaries on the traffic factor ξλ and the class of the point.
pub fn regimes(exp: &Experiment) -> Result<Table, CliError> {
    let mut t = with_var(
        exp,
        &[
            "traffic_factor",
            "interference_boundary",
            "noise_boundary",
            "regime",
        ],
    );
    for (v, p) in exp.points()? {
        let class = classify_regime(&p, &exp.thresholds);
        let mut row = lead_cell(v);
        row.extend([
            class.traffic_factor.into(),
            interference_limited_boundary(&p, &exp.thresholds).into(),
            noise_limited_boundary(&p, &exp.thresholds).into(),
            class.kind.as_str().into(),
        ]);
        t.push(row);
    }
    Ok(t)
}

/// Backlogged correlations and the correlation-maximizing pλ.
///
/// Without noise the correlation has no interior maximum; the peak columns
/// are then `nan`.
pub fn correlate(exp: &Experiment) -> Result<Table, CliError> {
    let swept = exp.sweep.map(|s| s.variable) == Some(SweepVar::PLambda);
    let mut cols = vec![
        "p_lambda",
        "interference_corr",
        "success_prob",
        "joint_success_prob",
        "success_corr",
        "p_lambda_star",
        "rho_star",
        "p_lambda_star_noise_limit",
    ];
    if swept {
        cols.remove(0);
    }
    let mut t = with_var(exp, &cols);
    for (v, p) in exp.points()? {
        let peak = match max_correlation_point(&p) {
            Ok(pk) => Some(pk),
            Err(AnalyticsError::Math(MathError::Bracket { .. })) => None,
            Err(e) => return Err(analytics_err(e)),
        };
        let mut row = lead_cell(v);
        if !swept {
            row.push((p.transmit_prob_p * p.density_lambda).into());
        }
        row.extend([
            interference_correlation(p.transmit_prob_p).into(),
            backlogged_success_prob(&p).into(),
            joint_success_prob(&p).into(),
            success_correlation(&p).map_err(analytics_err)?.into(),
            peak.map(|pk| pk.p_lambda).into(),
            peak.map(|pk| pk.rho).into(),
            max_correlation_point_noise_limit(&p).into(),
        ]);
        t.push(row);
    }
    Ok(t)
}

const ANALYTIC_COLUMNS: [&str; 5] = [
    "zeta0",
    "success_prob0",
    "delay0",
    "queue_len0",
    "stability",
];

fn analytic_cells(p: &msa_core::SystemParams) -> Vec<Cell> {
    let s = stationary_solution(p);
    vec![
        s.nonempty_prob_zeta0.into(),
        s.success_prob_p0.into(),
        s.mean_delay_d0.into(),
        s.mean_queue_len_l0.into(),
        s.stability.as_str().into(),
    ]
}

/// High-mobility stationary solution at each point.
pub fn analytic(exp: &Experiment) -> Result<Table, CliError> {
    let mut t = with_var(exp, &ANALYTIC_COLUMNS);
    for (v, p) in exp.points()? {
        let mut row = lead_cell(v);
        row.extend(analytic_cells(&p));
        t.push(row);
    }
    Ok(t)
}

const SIM_COLUMNS: [&str; 14] = [
    "nonempty_sim",
    "nonempty_sd",
    "delay_sim",
    "delay_sd",
    "success_sim",
    "success_sd",
    "queue_len_sim",
    "queue_len_sd",
    "stranded_fraction",
    "realizations",
    "interference_corr_sim",
    "interference_corr_se",
    "success_corr_sim",
    "success_corr_se",
];

/// Monte Carlo estimates next to the analytic solution. `_sd` columns are
/// across-realization standard deviations; `_se` columns are jackknife
/// standard errors.
pub fn simulate(exp: &Experiment) -> Result<Table, CliError> {
    let mut cols: Vec<&str> = Vec::new();
    if exp.outputs != Outputs::Analytics {
        cols.extend(SIM_COLUMNS);
    }
    if exp.outputs != Outputs::Simulation {
        cols.extend(ANALYTIC_COLUMNS);
    }
    let mut t = with_var(exp, &cols);
    let config = exp.sim.sim_config()?;
    for (v, p) in exp.points()? {
        let mut row = lead_cell(v);
        if exp.outputs != Outputs::Analytics {
            let recs =
                run_simulation(&p, &config).map_err(|e| CliError::Config(format!("sim: {e}")))?;
            let s = summarize(&recs, config.traffic, exp.sim.warmup, exp.sim.lag)
                .map_err(|e| CliError::Numeric(format!("statistics: {e}")))?;
            let pair = |m: Option<msa_core::stats::MeanStd>| {
                [m.map(|m| m.mean).into(), m.map(|m| m.std_dev).into()]
            };
            let est = |e: Option<msa_core::stats::Estimate>| {
                [e.map(|e| e.estimate).into(), e.map(|e| e.std_error).into()]
            };
            row.extend(pair(Some(s.nonempty_prob)));
            row.extend(pair(s.mean_delay));
            row.extend(pair(s.success_prob));
            row.extend(pair(Some(s.queue_length)));
            row.push(s.stranded_fraction.into());
            row.push(Cell::Int(recs.len() as u64));
            row.extend(est(s.interference_corr));
            row.extend(est(s.success_corr));
        }
        if exp.outputs != Outputs::Simulation {
            row.extend(analytic_cells(&p));
        }
        t.push(row);
    }
    Ok(t)
}
