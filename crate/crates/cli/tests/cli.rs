use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn msa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msa"))
        .args(args)
        .env("MSA_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("msa-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

struct Csv {
    header: serde_json::Value,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn parse(text: &str) -> Csv {
        let (first, rest) = text.split_once('\n').expect("at least two lines");
        let json = first
            .strip_prefix("# config: ")
            .expect("config comment line");
        let mut r = csv::Reader::from_reader(rest.as_bytes());
        Csv {
            header: serde_json::from_str(json).expect("header is JSON"),
            columns: r.headers().unwrap().iter().map(String::from).collect(),
            rows: r
                .records()
                .map(|rec| rec.unwrap().iter().map(String::from).collect())
                .collect(),
        }
    }

    fn column(&self, name: &str) -> Vec<f64> {
        let i = self.columns.iter().position(|c| c == name).unwrap();
        self.rows.iter().map(|r| r[i].parse().unwrap()).collect()
    }
}

fn ok(args: &[&str]) -> Csv {
    let out = msa(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    Csv::parse(std::str::from_utf8(&out.stdout).unwrap())
}

#[test]
fn analytic_subcommands_run_on_their_configs() {
    let cases = [
        ("region_vs_alpha.json", "region"),
        ("region_vs_noise.json", "region"),
        ("regime_boundaries.json", "regimes"),
        ("success_correlation.json", "correlate"),
        ("correlation_peak_vs_noise.json", "correlate"),
        ("backlogged_correlation.json", "correlate"),
        ("stationary_vs_alpha.json", "analytic"),
        ("delay_vs_arrival.json", "analytic"),
    ];
    for (name, cmd) in cases {
        let csv = ok(&[cmd, "--config", &config(name)]);
        assert_eq!(csv.header["command"], cmd);
        assert!(!csv.rows.is_empty(), "{cmd} {name}");
        assert!(csv.rows.iter().all(|r| r.len() == csv.columns.len()));
    }
}

#[test]
fn region_rejects_thresholds_outside_the_noise_window() {
    // At W = 10^-3.2 noise alone pushes the success probability below ε.
    let out = msa(&["region", "--config", &config("regime_boundaries.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("epsilon"));
}

#[test]
fn simulate_runs_on_simulation_configs() {
    for name in [
        "simulate_static.json",
        "simulate_mobile.json",
        "delay_vs_arrival.json",
        "backlogged_correlation.json",
    ] {
        let path = config(name);
        let csv = ok(&[
            "simulate",
            "--config",
            &path,
            "--realizations",
            "2",
            "--slots",
            "60",
        ]);
        assert!(csv.columns.contains(&"nonempty_sim".to_string()), "{name}");
        assert_eq!(csv.header["experiment"]["sim"]["num_slots"], 60);
        assert!(csv.column("realizations").iter().all(|&r| r == 2.0));
    }
}

#[test]
fn header_echoes_the_resolved_experiment() {
    let csv = ok(&["region"]);
    let params = &csv.header["experiment"]["params"];
    assert_eq!(params["pathloss_alpha"], 3.0);
    assert_eq!(params["density_lambda"], 0.01);
    assert_eq!(csv.columns, ["lambda0", "xi0"]);
    assert_eq!(csv.rows.len(), 1);
}

#[test]
fn alpha_sweep_adds_a_leading_column() {
    let csv = ok(&["analytic", "--alpha-sweep", "2.5:3.5:3"]);
    assert_eq!(csv.columns[0], "alpha");
    assert_eq!(csv.column("alpha"), [2.5, 3.0, 3.5]);
}

#[test]
fn stationary_success_peaks_at_an_interior_alpha() {
    let csv = ok(&["analytic", "--config", &config("stationary_vs_alpha.json")]);
    let s = csv.column("success_prob0");
    let top = (0..s.len()).max_by(|&a, &b| s[a].total_cmp(&s[b])).unwrap();
    assert!(top > 0 && top + 1 < s.len(), "argmax at index {top}");
}

#[test]
fn out_writes_the_same_bytes_as_stdout() {
    let path = scratch("region.csv");
    let out = msa(&["region", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), msa(&["region"]).stdout);
}

#[test]
fn seed_override_changes_simulation_output() {
    let run = |seed: &str| {
        msa(&[
            "simulate",
            "--realizations",
            "2",
            "--slots",
            "80",
            "--seed",
            seed,
        ])
        .stdout
    };
    assert_eq!(run("3"), run("3"));
    assert_ne!(run("3"), run("4"));
}

#[test]
fn config_errors_exit_1() {
    let unknown = scratch("unknown.json");
    std::fs::write(&unknown, r#"{"params":{"density":0.1}}"#).unwrap();
    let both = scratch("both.json");
    std::fs::write(&both, r#"{"params":{"theta_db":10,"theta_linear":10}}"#).unwrap();
    let negative = scratch("negative.json");
    std::fs::write(&negative, r#"{"params":{"density_lambda":-1}}"#).unwrap();
    for path in [&unknown, &both, &negative] {
        let out = msa(&["region", "--config", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(1), "{}", path.display());
        assert!(out.stdout.is_empty());
    }
    assert_eq!(
        msa(&["region", "--alpha-sweep", "3"]).status.code(),
        Some(1)
    );
    assert_eq!(msa(&["bogus"]).status.code(), Some(1));
    let out = Command::new(env!("CARGO_BIN_EXE_msa"))
        .arg("region")
        .env("MSA_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn numeric_failure_exits_2() {
    let empty = scratch("empty.json");
    std::fs::write(
        &empty,
        r#"{"params":{"density_lambda":1e-9},
            "sim":{"traffic":"backlogged","num_realizations":2,"num_slots":20}}"#,
    )
    .unwrap();
    let out = msa(&["simulate", "--config", empty.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("numerical failure"));
}

#[test]
fn io_errors_exit_3() {
    let missing = scratch("does-not-exist.json");
    let out = msa(&["region", "--config", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let bad_out = scratch("no-such-dir").join("x.csv");
    let out = msa(&["region", "--out", bad_out.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}
