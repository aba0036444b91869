use std::process::Command;

use gpba::harness::experiment::replication_seeds;
use gpba::harness::output::{read_records, read_summary, RECORD_COLUMNS};
use gpba::harness::{run_design_quality, run_experiment, ExperimentConfig};
use gpba::{EstimatorKind, PolicyKind, TestFunction};

fn gpba() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gpba"));
    cmd.env_remove("GPBA_OUTPUT_DIR");
    cmd
}

#[test]
fn synthetic_subcommand_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = gpba()
        .args(["synthetic", "--func", "h2", "--policy", "rand-q,syst-q", "--estimator", "clt,bar"])
        .args(["--batch", "250", "--budget", "2000", "--reps", "4", "--threads", "2"])
        .env("GPBA_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let records = read_records(&dir.path().join("synthetic-h2.csv")).unwrap();
    let summary = read_summary(&dir.path().join("synthetic-h2.json")).unwrap();
    assert!(records.len() > 4 * 4);
    assert!(summary.iter().any(|s| s.scheme == "rand-q:clt:250"));
    let header = std::fs::read_to_string(dir.path().join("synthetic-h2.csv")).unwrap();
    assert_eq!(header.lines().next().unwrap(), RECORD_COLUMNS.join(","));
}

#[test]
fn config_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = gpba().args(["synthetic", "--policy", "rand-q", "--batch", "250"]).arg("--out").arg(dir.path()).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));

    let out = gpba()
        .args(["synthetic", "--policy", "rand-q", "--batch", "250", "--budget", "500", "--sign-only"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());

    let out = gpba().args(["synthetic", "--policy", "zig-zag"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("grid.json");
    std::fs::write(
        &cfg,
        r#"{"problem":{"kind":"synthetic","func":"h3"},"policies":["syst-q"],"estimators":["median"],"batch_sizes":[100],"budget":1000,"reps":2}"#,
    )
    .unwrap();
    let out = gpba().arg("synthetic").arg("--config").arg(&cfg).args(["--reps", "3"]).arg("--out").arg(dir.path()).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let records = read_records(&dir.path().join("synthetic-h3.csv")).unwrap();
    assert_eq!(records.iter().map(|r| r.rep).max(), Some(2));
}

#[test]
fn tpo_table_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let out = gpba().args(["tpo-table", "--p", "0.7", "--alpha", "0.05,0.4", "--reps", "50"]).arg("--out").arg(dir.path()).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("tpo_table.csv")).unwrap();
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn finance_subcommand_writes_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let out = gpba()
        .args(["finance", "--policy", "rand-q", "--batch", "500", "--budget", "2000", "--reps", "2", "--lattice-steps", "500"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let boundary = std::fs::read_to_string(dir.path().join("boundary.csv")).unwrap();
    assert_eq!(boundary.lines().count(), 51);
    assert!(dir.path().join("finance.csv").exists());
}

#[test]
fn design_quality_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let out = gpba()
        .args(["design-quality", "--policy", "det-ids", "--estimator", "bar", "--batch", "250", "--budget", "2000", "--reps", "2"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = read_summary(&dir.path().join("design-h1.json")).unwrap();
    assert!(summary.iter().any(|s| s.scheme == "design:det-ids:bar:250"));
    assert!(summary.iter().any(|s| s.scheme == "median:exact:250"));
}

#[test]
fn thread_count_does_not_change_records() {
    let mut cfg = ExperimentConfig::synthetic(TestFunction::H1, vec![PolicyKind::RandIds, PolicyKind::Tpo], vec![EstimatorKind::Clt], vec![250], 3000);
    cfg.reps = 6;
    cfg.threads = 1;
    let serial = run_experiment(&cfg).unwrap();
    cfg.threads = 4;
    let parallel = run_experiment(&cfg).unwrap();
    assert_eq!(serial, parallel);
}

#[test]
fn replications_get_distinct_seeds() {
    let seeds: Vec<(u64, u64)> = (0..100).map(|r| replication_seeds(5, r)).collect();
    for i in 0..seeds.len() {
        assert_ne!(seeds[i].0, seeds[i].1);
        for j in i + 1..seeds.len() {
            assert_ne!(seeds[i], seeds[j]);
        }
    }
}

#[test]
fn metrics_invariants_hold_for_every_record() {
    let mut cfg = ExperimentConfig::synthetic(
        TestFunction::H2,
        vec![PolicyKind::DetIds, PolicyKind::SystQ, PolicyKind::Uniform],
        vec![EstimatorKind::Mode, EstimatorKind::Boost],
        vec![100],
        3000,
    );
    cfg.reps = 5;
    let table = run_experiment(&cfg).unwrap();
    for r in &table.records {
        assert!(r.residual.unwrap() >= 0.0 && r.ci_len >= 0.0 && r.ci_len <= 1.0);
        assert!(r.budget_used <= r.t);
    }
    for s in &table.summary {
        let c = s.coverage.unwrap();
        assert!((0.0..=1.0).contains(&c));
    }
}

#[test]
fn median_baseline_keeps_wide_intervals() {
    let mut cfg = ExperimentConfig::synthetic(TestFunction::H1, vec![PolicyKind::RandQ], vec![EstimatorKind::Clt], vec![250], 20_000);
    cfg.reps = 40;
    cfg.checkpoints = vec![2_000, 20_000];
    let table = run_design_quality(&cfg).unwrap();
    let median = table.find("median:exact:250", 20_000).unwrap();
    let ids = table.find("true-ids:exact:250", 20_000).unwrap();
    assert!(median.mean_ci_len > 5.0 * ids.mean_ci_len, "{} vs {}", median.mean_ci_len, ids.mean_ci_len);
    let early = table.find("uniform:exact:250", 2_000).unwrap().median_residual.unwrap();
    let late = table.find("uniform:exact:250", 20_000).unwrap().median_residual.unwrap();
    assert!(late < early);
}
