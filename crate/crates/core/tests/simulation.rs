use msa_core::analytics::{backlogged_success_prob, stationary_solution};
use msa_core::sim::{run_simulation, sample_topology, Mobility, SimConfig, Streams, Traffic};
use msa_core::stats::{estimate_delay, estimate_nonempty, estimate_queue_length, estimate_success};
use msa_core::SystemParams;
use statrs::distribution::{ChiSquared, ContinuousCDF, DiscreteCDF, Poisson};

fn reference(alpha: f64) -> SystemParams {
    SystemParams::new(0.01, 0.01, 0.5, 5.0, alpha, 10.0, 10f64.powf(-3.3)).unwrap()
}

#[test]
fn link_counts_are_poisson() {
    let params = reference(3.0).with_lambda(0.0005);
    let config = SimConfig {
        window_side: 100.0,
        margin: 0.0,
        ..SimConfig::default()
    };
    let mean = 0.0005 * 100.0 * 100.0;
    let runs = 2000;
    let counts: Vec<u64> = (0..runs)
        .map(|i| sample_topology(&params, &config, &mut Streams::new(17, i).placement).len() as u64)
        .collect();
    // Bins 0..=2, 3, ..., 8, ≥9 for mean 5.
    let law = Poisson::new(mean).unwrap();
    let mut edges: Vec<(u64, u64)> = vec![(0, 2)];
    edges.extend((3..=8).map(|k| (k, k)));
    edges.push((9, u64::MAX));
    let mut chi2 = 0.0;
    for &(lo, hi) in &edges {
        let observed = counts.iter().filter(|&&c| c >= lo && c <= hi).count() as f64;
        let below = if lo == 0 { 0.0 } else { law.cdf(lo - 1) };
        let upper = if hi == u64::MAX { 1.0 } else { law.cdf(hi) };
        let expected = (upper - below) * runs as f64;
        chi2 += (observed - expected).powi(2) / expected;
    }
    let crit = ChiSquared::new((edges.len() - 1) as f64)
        .unwrap()
        .inverse_cdf(0.999);
    assert!(chi2 < crit, "chi2 {chi2} ≥ {crit}");
}

#[test]
fn backlogged_success_probability_matches_closed_form() {
    // α = 4, θ = 1 keeps the truncated share of the interference field small.
    let params = SystemParams::new(0.005, 0.0, 0.5, 5.0, 4.0, 1.0, 1e-4).unwrap();
    let config = SimConfig {
        num_realizations: 40,
        num_slots: 300,
        traffic: Traffic::Backlogged,
        seed: 3,
        ..SimConfig::default()
    };
    let recs = run_simulation(&params, &config).unwrap();
    let s = estimate_success(&recs).unwrap();
    let target = backlogged_success_prob(&params);
    let se = s.std_dev / (recs.len() as f64).sqrt();
    assert!(
        (s.mean - target).abs() < 4.0 * se + 0.01 * target,
        "{} vs {target} (se {se})",
        s.mean
    );
}

#[test]
fn queue_time_equals_packet_residence() {
    // Sample-path Little's law: packet-slots counted at slot starts equal the
    // summed residence of every packet, delivered or stranded.
    let params = reference(3.0).with_xi(0.015);
    let config = SimConfig {
        num_realizations: 4,
        num_slots: 1500,
        seed: 8,
        ..SimConfig::default()
    };
    for r in run_simulation(&params, &config).unwrap() {
        let queued: u64 = r.queued_series.iter().sum();
        let horizon = config.num_slots as u64;
        let residence: u64 = r
            .links
            .iter()
            .filter(|l| l.interior_at_end)
            .map(|l| {
                l.delivered.iter().map(|d| d.delay()).sum::<u64>()
                    + l.stranded.iter().map(|a| horizon - a).sum::<u64>()
            })
            .sum();
        assert_eq!(queued, residence);
    }
}

#[test]
fn littles_law_on_stable_load() {
    let params = reference(3.4).with_xi(0.005);
    let config = SimConfig {
        num_realizations: 6,
        num_slots: 3000,
        seed: 8,
        ..SimConfig::default()
    };
    let recs = run_simulation(&params, &config).unwrap();
    let warmup = 300;
    let l = estimate_queue_length(&recs, warmup).unwrap().mean;
    let d = estimate_delay(&recs, warmup).unwrap().mean;
    assert!(
        (l / (params.arrival_rate_xi * d) - 1.0).abs() < 0.05,
        "L = {l}, ξD = {}",
        params.arrival_rate_xi * d
    );
}

#[test]
fn high_mobility_tracks_stationary_solution() {
    let params = reference(3.4);
    let config = SimConfig {
        num_realizations: 8,
        num_slots: 1500,
        mobility: Mobility::HighMobility,
        seed: 4,
        ..SimConfig::default()
    };
    let recs = run_simulation(&params, &config).unwrap();
    let z = estimate_nonempty(&recs, 300).unwrap();
    let target = stationary_solution(&params).nonempty_prob_zeta0;
    assert!(
        (z.mean / target - 1.0).abs() < 0.1,
        "{} vs {target}",
        z.mean
    );
}
