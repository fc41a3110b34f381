use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use msa_core::analytics::{max_correlation_point, msa_region, stationary_solution};
use msa_core::sim::{run_realization, Network};
use msa_core::special::lambert_w0;
use msa_core::{MsaThresholds, SimConfig, SystemParams, Traffic};

fn base() -> SystemParams {
    SystemParams::new(0.01, 0.01, 0.5, 5.0, 3.0, 10.0, 10f64.powf(-3.3)).expect("valid")
}

fn closed_forms(c: &mut Criterion) {
    let p = base();
    let th = MsaThresholds::new(0.1, 50.0, 0.5).expect("valid");
    c.bench_function("lambert_w0", |b| b.iter(|| lambert_w0(black_box(2.5))));
    c.bench_function("msa_region", |b| b.iter(|| msa_region(black_box(&p), &th)));
    c.bench_function("stationary_solution", |b| {
        b.iter(|| stationary_solution(black_box(&p)))
    });
    c.bench_function("max_correlation_point", |b| {
        b.iter(|| max_correlation_point(black_box(&p.with_noise(1e-4))))
    });
}

fn simulation(c: &mut Criterion) {
    let p = base();
    let config = SimConfig {
        num_realizations: 1,
        num_slots: 100,
        ..SimConfig::default()
    };
    let mut net = Network::new(p, config, 0);
    c.bench_function("step_slot_static", |b| b.iter(|| net.step_slot()));

    let backlogged = SimConfig {
        traffic: Traffic::Backlogged,
        ..config
    };
    let mut g = c.benchmark_group("realization");
    g.sample_size(10);
    g.bench_function("queued_100_slots", |b| {
        b.iter(|| run_realization(&p, &config, 0))
    });
    g.bench_function("backlogged_100_slots", |b| {
        b.iter(|| run_realization(&p, &backlogged, 0))
    });
    g.finish();
}

criterion_group!(benches, closed_forms, simulation);
criterion_main!(benches);
