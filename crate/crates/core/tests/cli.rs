use std::path::Path;
use std::process::{Command, Output};

use riscov::cli::{run_analytic, run_sweep, NetworkConfig, SweepAxis, SweepOptions, CSV_HEADER};

fn riscov(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_riscov"));
    cmd.args(args).env("NO_COLOR", "1");
    match threads {
        Some(t) => cmd.env("RISCOV_THREADS", t),
        None => cmd.env_remove("RISCOV_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn header_is_bit_exact() {
    let out = riscov(&["analytic"], None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(
        text.lines().next().unwrap(),
        "engine,metric,T_db,axis_name,axis_value,value,ci_half_width,n_trials,config_hash,seed"
    );
}

#[test]
fn baseline_row_at_zero_db() {
    let rows = run_analytic(&NetworkConfig::default()).unwrap();
    let r = rows
        .iter()
        .find(|r| r.engine == "analytic_q2" && r.t_db == Some(0.0))
        .unwrap();
    assert!((r.value - 0.83587).abs() < 5e-5);
    assert_eq!(rows.iter().filter(|r| r.t_db == Some(0.0)).count(), 6);
}

#[test]
fn empty_threshold_list_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "e.toml", "thresholds_db = []\n");
    let out = riscov(&["analytic", "--config", &cfg], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1);
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let alpha = write(dir.path(), "a.toml", "alpha = 2.0\n");
    let out = riscov(&["analytic", "--config", &alpha], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));

    let typo = write(dir.path(), "t.toml", "lambda_rs = 5.0\n");
    assert_eq!(riscov(&["analytic", "--config", &typo], None).status.code(), Some(2));

    let neg = write(dir.path(), "n.json", "{\"lambda_bs\": -1.0}");
    let out = riscov(&["analytic", "--config", &neg], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda_bs"));

    assert_eq!(riscov(&["sweep", "--axis", "T", "--grid", "5,1"], None).status.code(), Some(2));
    assert_eq!(riscov(&["sweep", "--axis", "M", "--grid", "10.5"], None).status.code(), Some(2));
    assert_eq!(riscov(&["simulate", "--trials", "10"], None).status.code(), Some(2));
    assert_eq!(riscov(&["bogus"], None).status.code(), Some(2));
}

#[test]
fn empty_scenario_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "w.toml", "bs_window = 0.001\n");
    let out = riscov(&["simulate", "--config", &cfg, "--trials", "200"], None);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trial"));
}

#[test]
fn gate_without_engine_output_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "g.toml",
        "[[gates]]\nengine = \"analytic_q2\"\nmetric = \"gamma_o\"\nkind = \"abs_gap\"\n\
         tolerance = 0.02\nthresholds_db = [3.0]\n",
    );
    let out = riscov(&["compare", "--config", &cfg, "--trials", "500"], None);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn wrong_alpha_in_one_engine_fails_the_gate() {
    let dir = tempfile::tempdir().unwrap();
    let wrong = write(dir.path(), "wrong.toml", "alpha = 3.0\n");
    let out_dir = dir.path().join("out");
    let out = riscov(
        &[
            "compare",
            "--analytic-config",
            &wrong,
            "--trials",
            "5000",
            "--out",
            out_dir.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("compare.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], false);
}

#[test]
fn simulate_is_reproducible_and_thread_independent() {
    let args = ["simulate", "--trials", "3000", "--seed", "9"];
    let a = riscov(&args, Some("1"));
    let b = riscov(&args, Some("3"));
    let c = riscov(&args, None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    // 4 metrics x 7 thresholds.
    assert_eq!(text.lines().count(), 1 + 28);
    let d = riscov(&["simulate", "--trials", "3000", "--seed", "10"], None);
    assert_ne!(text.as_bytes(), d.stdout.as_slice());
}

#[test]
fn sweep_cardinality() {
    let cfg = NetworkConfig::default();
    let grid = [100.0, 1000.0, 10_000.0, 50_000.0];
    let rows = run_sweep(&cfg, SweepAxis::LambdaRis, &grid, &SweepOptions::default(), None).unwrap();
    let approx2: Vec<_> = rows
        .iter()
        .filter(|r| r.engine == "approx2" && r.metric == "gamma_b" && r.t_db == Some(5.0))
        .collect();
    assert_eq!(approx2.len(), 4);
    assert!(approx2.iter().all(|r| r.axis_name == "lambda_ris_per_km2"));
    let hashes: std::collections::HashSet<_> = approx2.iter().map(|r| &r.config_hash).collect();
    assert_eq!(hashes.len(), 4);
    let per_engine = rows.iter().filter(|r| r.engine == "analytic_q2").count();
    assert_eq!(per_engine, 4 * cfg.thresholds_db.len());
}

#[test]
fn hist_writes_plot_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("h");
    let out = riscov(
        &["hist", "--quantity", "r0", "--trials", "3000", "--bins", "20", "--out", out_dir.to_str().unwrap()],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(out_dir.join("hist_r0.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "bin_lo,bin_hi,density,count,reference");
    assert_eq!(text.lines().count(), 21);
}
