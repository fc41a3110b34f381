//! Quick oracle checks: closed forms against identities and small Monte
//! Carlo runs. Each row reports the measured value, the target and the
//! tolerance it was held to.

use msa_core::analytics::{
    backlogged_success_prob, correlation_slope_numerator, geo_geo1_mean_delay,
    max_correlation_point, stationary_solution,
};
use msa_core::sim::{
    run_network, run_simulation, Link, Mobility, Network, SimConfig, Streams, Topology, Traffic,
};
use msa_core::special::{lambert_w0, BRANCH_POINT};
use msa_core::stats::{estimate_delay, estimate_nonempty, estimate_success};
use msa_core::SystemParams;

use crate::config::reference_params;
use crate::output::{Cell, Table};

struct Check {
    name: &'static str,
    value: f64,
    target: f64,
    tolerance: f64,
    pass: bool,
}

fn abs_check(name: &'static str, value: f64, target: f64, tolerance: f64) -> Check {
    Check {
        name,
        value,
        target,
        tolerance,
        pass: (value - target).abs() <= tolerance,
    }
}

fn rel_check(name: &'static str, value: f64, target: f64, tolerance: f64) -> Check {
    Check {
        name,
        value,
        target,
        tolerance,
        pass: (value / target - 1.0).abs() <= tolerance,
    }
}

fn lambert_residual() -> Check {
    let (lo, hi) = (-9.0f64, (1e6 - BRANCH_POINT).log10());
    let worst = (0..200)
        .map(|i| {
            let z = BRANCH_POINT + 10f64.powf(lo + (hi - lo) * i as f64 / 199.0);
            let w = lambert_w0(z).unwrap_or(f64::NAN);
            (w * w.exp() - z).abs() / z.abs().max(1.0)
        })
        .fold(
            0.0f64,
            |a, b| if b.is_nan() { f64::INFINITY } else { a.max(b) },
        );
    abs_check("lambert_w0_residual", worst, 0.0, 1e-12)
}

fn fixed_point(base: SystemParams) -> Check {
    let mut worst = 0.0f64;
    for i in 0..10 {
        for j in 0..10 {
            let p = base
                .with_lambda(0.001 + 0.001 * i as f64)
                .with_xi(0.001 + 0.0015 * j as f64);
            let s = stationary_solution(&p);
            if !s.stable() {
                continue;
            }
            let d = p.derived();
            let q = p.transmit_prob_p;
            let z = s.nonempty_prob_zeta0;
            let rhs =
                p.arrival_rate_xi / q * (q * z * p.density_lambda * d.c0 + d.noise_exponent).exp();
            worst = worst
                .max((rhs - z).abs())
                .max((z * q * s.success_prob_p0 - p.arrival_rate_xi).abs());
        }
    }
    abs_check("stationary_fixed_point", worst, 0.0, 1e-10)
}

fn correlation_peak_root(base: SystemParams) -> Check {
    let p = base.with_noise(1e-4);
    let d = p.derived();
    let res = max_correlation_point(&p)
        .map(|pk| {
            correlation_slope_numerator(pk.t0, 2.0 - 2f64.powf(d.delta), (-d.noise_exponent).exp())
                .abs()
        })
        .unwrap_or(f64::INFINITY);
    abs_check("correlation_peak_root", res, 0.0, 1e-10)
}

fn lone_link_delay(seed: u64) -> Check {
    // p = 1 and θWr₀^α = ln 2 give per-slot service probability 1/2.
    let params = SystemParams::new(
        0.01,
        0.25,
        1.0,
        5.0,
        3.0,
        1.0,
        std::f64::consts::LN_2 / 125.0,
    )
    .expect("valid");
    let config = SimConfig {
        num_slots: 200_000,
        seed,
        ..SimConfig::default()
    };
    let topo = Topology {
        links: vec![Link {
            tx: [100.0, 100.0],
            rx: [105.0, 100.0],
        }],
        window_side: 240.0,
        margin: 20.0,
    };
    let rec = run_network(
        Network::with_topology(params, config, topo, Streams::new(seed, 0)),
        0,
    );
    let d = estimate_delay(std::slice::from_ref(&rec), 1000)
        .map(|d| d.mean)
        .unwrap_or(f64::NAN);
    rel_check(
        "geo_geo1_delay",
        d,
        geo_geo1_mean_delay(0.25, 0.5).finite().expect("stable"),
        0.03,
    )
}

fn backlogged_success(seed: u64) -> Check {
    let params = SystemParams::new(0.005, 0.0, 0.5, 5.0, 4.0, 1.0, 1e-4).expect("valid");
    let config = SimConfig {
        num_realizations: 16,
        num_slots: 200,
        traffic: Traffic::Backlogged,
        seed,
        ..SimConfig::default()
    };
    let s = run_simulation(&params, &config)
        .ok()
        .and_then(|r| estimate_success(&r).ok())
        .map(|s| s.mean);
    rel_check(
        "backlogged_success_prob",
        s.unwrap_or(f64::NAN),
        backlogged_success_prob(&params),
        0.03,
    )
}

fn mobile_nonempty(base: SystemParams, seed: u64) -> Check {
    let config = SimConfig {
        num_realizations: 8,
        num_slots: 800,
        mobility: Mobility::HighMobility,
        seed,
        ..SimConfig::default()
    };
    let z = run_simulation(&base, &config)
        .ok()
        .and_then(|r| estimate_nonempty(&r, 200).ok())
        .map(|z| z.mean);
    rel_check(
        "high_mobility_nonempty",
        z.unwrap_or(f64::NAN),
        stationary_solution(&base).nonempty_prob_zeta0,
        0.10,
    )
}

/// Runs every check; the flag is true when all passed.
pub fn selftest(seed: u64) -> (Table, bool) {
    let base = reference_params();
    let checks = [
        lambert_residual(),
        fixed_point(base),
        correlation_peak_root(base),
        lone_link_delay(seed),
        backlogged_success(seed),
        mobile_nonempty(base, seed),
    ];
    let mut t = Table::new(["check", "value", "target", "tolerance", "pass"]);
    for c in &checks {
        t.push(vec![
            c.name.into(),
            c.value.into(),
            c.target.into(),
            c.tolerance.into(),
            Cell::from(c.pass),
        ]);
    }
    (t, checks.iter().all(|c| c.pass))
}
