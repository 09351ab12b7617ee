use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use besov_ns::Exponent;
use besov_ns_cli::config::{Init, Series};
use besov_ns_cli::ExperimentConfig;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_besov-ns"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn preset(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../presets").join(name)
}

fn csv_column(path: &Path, name: &str) -> Vec<String> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let i = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[i].to_string()).collect()
}

const SMALL: [&str; 8] = [
    "--set",
    "grid.N=16",
    "--set",
    "corpus.count=2",
    "--set",
    "corpus.inequality_count=3",
    "--set",
    "corpus.index_samples=50",
];

fn verify(out: &Path, seed: &str) -> Output {
    let mut args = vec!["verify", "--seed", seed, "--out", out.to_str().unwrap()];
    args.extend(SMALL);
    run(&args)
}

#[test]
fn config_round_trip() {
    let mut cfg = ExperimentConfig::default();
    assert_eq!(ExperimentConfig::parse(&cfg.serialize()).unwrap(), cfg);
    cfg.length = 0.1 + 0.2;
    cfg.seed = u64::MAX;
    cfg.init = Init::Snapshot(PathBuf::from("runs/a b.bsnap"));
    cfg.eps = vec![1.0, 1.25, 2.0];
    cfg.pq = vec![(Exponent::new(2.5).unwrap(), Exponent::INFINITY), (Exponent::ONE, Exponent::ONE)];
    cfg.t_blowup = None;
    cfg.series = Series::Path(PathBuf::from("/tmp/x"));
    let text = cfg.serialize();
    let back = ExperimentConfig::parse(&text).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.serialize(), text);
}

#[test]
fn every_preset_is_valid() {
    for name in ["taylor_green", "random_decay", "synthetic_eps1.5", "synthetic_eps2", "verify"] {
        let cfg = ExperimentConfig::load(&preset(&format!("{name}.conf"))).unwrap();
        cfg.validate().unwrap();
    }
}

#[test]
fn non_power_of_two_grid_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.conf");
    fs::write(&conf, "grid.N=48\n").unwrap();
    let out = run(&["verify", "--config", conf.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("grid.N"), "{}", text(&out.stderr));
    assert!(!dir.path().join("summary.csv").exists());
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--set", "grid.x=1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--set", "nonsense"]).status.code(), Some(2));
}

#[test]
fn verify_is_deterministic_and_seed_independent_in_outcome() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    for (dir, seed) in [(&a, "7"), (&b, "7"), (&c, "8")] {
        let out = verify(dir.path(), seed);
        assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    }
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 12, "{names:?}");
    for name in &names {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert!(x == y, "{name:?} differs between identical runs");
    }
    let status_a = csv_column(&a.path().join("summary.csv"), "status");
    let status_c = csv_column(&c.path().join("summary.csv"), "status");
    assert_eq!(status_a, status_c);
    assert!(status_a.iter().all(|s| s != "fail"));
    let ratios_a = fs::read(a.path().join("bernstein.csv")).unwrap();
    let ratios_c = fs::read(c.path().join("bernstein.csv")).unwrap();
    assert_ne!(ratios_a, ratios_c);
}

#[test]
fn taylor_green_run_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "simulate",
        "--n",
        "3",
        "--N",
        "16",
        "--dt",
        "0.001",
        "--t-end",
        "0.05",
        "--init",
        "taylor-green",
        "--snapshot-every",
        "10",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let stdout = text(&out.stdout);
    let err: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("Taylor-Green L2 error "))
        .expect("error line")
        .parse()
        .unwrap();
    assert!(err <= 1e-6, "{stdout}");
    assert_eq!(csv_column(&dir.path().join("series.csv"), "t").len(), 51);
    assert_eq!(csv_column(&dir.path().join("snapshots.csv"), "file").len(), 6);
}

#[test]
fn low_amplitude_random_run_decays_and_diagnoses() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let conf = preset("random_decay.conf");
    let c = conf.to_str().unwrap();
    let out = run(&["simulate", "--config", c, "--t-end", "0.1", "--out", d]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let energy: Vec<f64> = csv_column(&dir.path().join("series.csv"), "energy")
        .iter()
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(energy.len(), 11);
    assert!(energy.windows(2).all(|w| w[1] <= w[0]), "{energy:?}");

    let emit = dir.path().join("diag/series.csv");
    let out = run(&["diagnose", "--config", c, "--series", d, "--out", d, "--emit", emit.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let mut r = csv::Reader::from_path(&emit).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        ["t", "eps", "p", "q", "norm", "fitted_slope_running", "budget_lhs", "budget_rhs", "ratio", "interp_slack"]
    );
    let rows: Vec<_> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0][6].is_empty() && !rows[1][6].is_empty());
    for row in &rows {
        let slack: f64 = row[9].parse().unwrap();
        assert!(slack >= -1e-10);
        assert!(row[5].is_empty());
    }
}

#[test]
fn cfl_violation_only_warns() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "simulate",
        "--N",
        "16",
        "--dt",
        "0.25",
        "--t-end",
        "0.25",
        "--snapshot-every",
        "0",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert!(text(&out.stderr).contains("CFL"), "{}", text(&out.stderr));
}

#[test]
fn empty_series_directory_is_a_clean_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let out = run(&["diagnose", "--series", empty.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(text(&out.stderr).starts_with("error: "));
    let missing = dir.path().join("missing");
    let out = run(&["diagnose", "--series", missing.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn norm_series_csv_is_fitted() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("norms.csv");
    let mut body = String::from("t,norm\n");
    for k in 0..8 {
        let t = 1.0 - 0.5f64.powi(k);
        body += &format!("{t},{}\n", 3.0 * (2.0 - t).powf(-0.625));
    }
    fs::write(&series, body).unwrap();
    let out = run(&["diagnose", "--series", series.to_str().unwrap(), "--eps", "1.25", "--T", "2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let slope: f64 = csv_column(&dir.path().join("diagnose_summary.csv"), "slope")[0].parse().unwrap();
    assert!((slope + 0.625).abs() < 1e-12);
}

#[test]
fn synthetic_family_rates() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let grid = ["--set", "grid.N=64", "--set", "grid.L=25.132741228718345", "--set", "diagnostics.samples=10"];
    for (eps, p, q, target) in [("1.5", "2", "2", -0.75), ("2", "2", "1", -1.0)] {
        let mut args = vec!["diagnose", "--series", "synthetic", "--eps", eps, "--p", p, "--q", q, "--T", "1", "--out", d];
        args.extend(grid);
        let out = run(&args);
        assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
        let slope: f64 = csv_column(&dir.path().join("diagnose_summary.csv"), "slope")[0].parse().unwrap();
        assert!((slope - target).abs() <= 0.05, "eps={eps}: slope {slope}");
    }
}

#[test]
fn decompose_and_norm() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = run(&["decompose", "--set", "grid.N=32", "--out", d]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let stdout = text(&out.stdout);
    let defect: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("reconstruction defect (relative L2) "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(defect < 1e-12, "{stdout}");
    let fractions: f64 = csv_column(&dir.path().join("bands.csv"), "energy_fraction")
        .iter()
        .map(|v| v.parse::<f64>().unwrap())
        .sum();
    assert!(fractions > 0.5 && fractions <= 1.0 + 1e-12);

    let out = run(&["norm", "--set", "grid.N=32", "--s", "-0.5", "--p", "2", "--q", "2", "--out", d]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let b: f64 = csv_column(&dir.path().join("norms.csv"), "besov")[0].parse().unwrap();
    let h: f64 = csv_column(&dir.path().join("norms.csv"), "sobolev")[0].parse().unwrap();
    assert!(b > 0.0 && (b / h - 1.0).abs() < 0.5);
    let out = run(&["norm", "--set", "grid.N=32", "--s", "0", "--p", "inf", "--q", "1", "--out", d]);
    assert_eq!(out.status.code(), Some(0));
    assert!(csv_column(&dir.path().join("norms.csv"), "sobolev")[0].is_empty());
}
