use gsqg::solver::load_snapshot;
use gsqg_cli::config::{parse_config, RunConfig};
use proptest::prelude::*;
use std::path::Path;
use std::process::{Command, Output};

fn gsqg(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gsqg"))
        .args(args)
        .current_dir(dir)
        .env_remove("GSQG_THREADS")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    std::fs::write(dir.join(name), body).unwrap();
    name.to_string()
}

#[test]
fn ode_suite_with_default_battery_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "v.json", r#"{"suites": ["ode"]}"#);
    let out = gsqg(&["verify", "--config", &cfg, "--out", "v"], tmp.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(tmp.path().join("v/ode.csv").exists());
}

#[test]
fn reference_only_sweep_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "s.json", r#"{"alpha0": 0.5, "alphas": [0.5]}"#);
    let out = gsqg(&["sweep", "--config", &cfg, "--out", "s"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn steady_run_keeps_its_snapshot() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "r.json",
        r#"{"solver": {"alpha": 0.5, "n": 64, "t_end": 0.5},
            "initial": {"profile": "single_mode", "k1": 1, "k2": 0, "amplitude": 1.0}}"#,
    );
    let out = gsqg(&["run", "--config", &cfg, "--out", "r"], tmp.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let a = load_snapshot(tmp.path().join("r/initial.gsf1")).unwrap();
    let b = load_snapshot(tmp.path().join("r/final.gsf1")).unwrap();
    assert!(b.omega.max_abs_diff(&a.omega).unwrap() < 1e-10);
    assert!((b.t - 0.5).abs() < 1e-12);

    let lp = write(tmp.path(), "lp.json", r#"{"snapshot": "r/final.gsf1"}"#);
    let out = gsqg(&["lp", "--config", &lp, "--out", "r"], tmp.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let blocks = std::fs::read_to_string(tmp.path().join("r/lp_blocks.csv")).unwrap();
    assert!(blocks.starts_with("q,l2,energy,energy_fraction\n"));

    let out = gsqg(&["report", "r"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(tmp.path().join("r/diagnostics.svg").exists());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("r/summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["verdicts"]["run"], true);
}

#[test]
fn schema_violation_names_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bad.json", r#"{"solver": {"n": "many"}}"#);
    let out = gsqg(&["run", "--config", &cfg, "--out", "b"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/solver/n"));
}

#[test]
fn invalid_values_and_missing_files_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "a.json", r#"{"solver": {"alpha": 0.7}}"#);
    assert_eq!(
        gsqg(&["run", "--config", &cfg], tmp.path()).status.code(),
        Some(2)
    );
    assert_eq!(
        gsqg(&["run", "--config", "missing.json"], tmp.path())
            .status
            .code(),
        Some(2)
    );
    let lp = write(tmp.path(), "lp.json", r#"{"snapshot": "nowhere.gsf1"}"#);
    assert_eq!(
        gsqg(&["lp", "--config", &lp], tmp.path()).status.code(),
        Some(2)
    );
    assert_eq!(
        gsqg(&["run", "--threads", "0"], tmp.path()).status.code(),
        Some(2)
    );
}

#[test]
fn failing_check_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "o.json",
        r#"{"suites": ["ode"], "ode": {"count": 3, "cases": [
            {"m": 1.0, "t_end": 1.0, "g": 1.0, "forcing": {"profile": "constant", "value": 1.0}, "nu": 5.0}]}}"#,
    );
    let out = gsqg(&["verify", "--config", &cfg, "--out", "o"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let csv = std::fs::read_to_string(tmp.path().join("o/ode_cases.csv")).unwrap();
    assert!(csv.contains("case_0"));
}

#[test]
fn thread_count_falls_back_to_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "v.json",
        r#"{"suites": ["ode"], "ode": {"count": 5}}"#,
    );
    let out = Command::new(env!("CARGO_BIN_EXE_gsqg"))
        .args(["verify", "--config", &cfg, "--out", "v"])
        .current_dir(tmp.path())
        .env("GSQG_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = Command::new(env!("CARGO_BIN_EXE_gsqg"))
        .args(["verify", "--config", &cfg, "--out", "v"])
        .current_dir(tmp.path())
        .env("GSQG_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn run_configs_round_trip(
        alpha in 0.0f64..=0.5,
        log_n in 4u32..9,
        t_end in 0.01f64..10.0,
        cfl in 0.05f64..1.0,
        every in proptest::option::of(0.01f64..1.0),
    ) {
        let mut cfg = RunConfig::default();
        cfg.solver.alpha = alpha;
        cfg.solver.n = 1 << log_n;
        cfg.solver.t_end = t_end;
        cfg.solver.cfl = cfl;
        cfg.solver.snapshot_every = every;
        let text = serde_json::to_string(&cfg).unwrap();
        prop_assert_eq!(parse_config::<RunConfig>(&text).unwrap(), cfg);
    }
}
