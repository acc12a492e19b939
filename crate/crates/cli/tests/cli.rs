use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bandcorr(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bandcorr"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("SOURCE_DATE_EPOCH", "0")
        .output()
        .expect("binary runs")
}

fn ok(out: &Path, args: &[&str]) -> String {
    let o = bandcorr(out, args);
    assert!(o.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn read(path: impl AsRef<Path>) -> String {
    fs::read_to_string(path.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

fn column(csv_text: &str, name: &str) -> Vec<f64> {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let idx = r.headers().unwrap().iter().position(|h| h == name).expect("column present");
    r.records().map(|rec| rec.unwrap()[idx].parse().unwrap()).collect()
}

#[test]
fn zero_offset_gives_unit_ratio_and_limits() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["simulate", "--n", "8", "--w", "2", "--zeta", "0", "--samples", "20"]);
    let text = read(dir.path().join("simulate.csv"));
    for col in ["ratio", "ginibre", "factorized", "critical"] {
        for v in column(&text, col) {
            assert!((v - 1.0).abs() <= 1e-12, "{col} = {v}");
        }
    }
}

#[test]
fn simulate_is_bit_identical_across_thread_counts() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let args = ["simulate", "--n", "12,20", "--kappa", "0.7", "--zeta", "0.5", "--zeta", "0.3,0.4", "--samples", "64"];
    ok(a.path(), &[&args[..], &["--threads", "1"]].concat());
    ok(b.path(), &[&args[..], &["--threads", "3"]].concat());
    for f in ["simulate.csv", "simulate_summary.csv"] {
        assert_eq!(read(a.path().join(f)), read(b.path().join(f)), "{f}");
    }
}

#[test]
fn different_seeds_give_different_ratios() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let args = ["simulate", "--n", "10", "--w", "3", "--zeta", "0.5", "--samples", "32"];
    ok(a.path(), &[&args[..], &["--seed", "1"]].concat());
    ok(b.path(), &[&args[..], &["--seed", "2"]].concat());
    assert_ne!(column(&read(a.path().join("simulate.csv")), "ratio"), column(&read(b.path().join("simulate.csv")), "ratio"));
}

#[test]
fn metadata_honours_source_date_epoch() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["covariance", "--n", "6", "--w", "1.5"]);
    let doc: serde_json::Value = serde_json::from_str(&read(dir.path().join("covariance.json"))).unwrap();
    assert_eq!(doc["metadata"]["timestamp"], "1970-01-01T00:00:00Z");
    assert_eq!(doc["metadata"]["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(read(dir.path().join("covariance.csv")).lines().count(), 6);
}

#[test]
fn both_bandwidths_in_config_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"simulate": {"n": [8], "w": 2.0, "kappa": 1.0}}"#).unwrap();
    let o = bandcorr(dir.path(), &["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("simulate"));
}

#[test]
fn unknown_config_field_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"limits": {"kappa": [1.0]}}"#).unwrap();
    let o = bandcorr(dir.path(), &["limits", "--config", cfg.to_str().unwrap()]);
    assert!(!o.status.success());
}

#[test]
fn flag_overrides_config_bandwidth() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"seed": 5, "simulate": {"n": [9], "kappa": 1.0, "zeta": [0.2], "n_samples": 16}}"#).unwrap();
    ok(dir.path(), &["simulate", "--config", cfg.to_str().unwrap(), "--w", "2"]);
    let text = read(dir.path().join("simulate.csv"));
    assert_eq!(column(&text, "W"), vec![2.0]);
    assert_eq!(column(&text, "seed"), vec![5.0]);
}

#[test]
fn limits_table_covers_the_grid_in_both_modes() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["limits", "--kappa-u", "0.5,2", "--zeta", "0", "--zeta", "1"]);
    let text = read(dir.path().join("limits.csv"));
    let crit = column(&text, "critical");
    assert_eq!(crit.len(), 8);
    let (fac, gin) = (column(&text, "factorized"), column(&text, "ginibre"));
    // rows are grouped by mode; the literal mode is not bounded
    for i in 0..4 {
        assert!(fac[i] <= crit[i] + 1e-12 && crit[i] <= gin[i] + 1e-12);
    }
}

#[test]
fn spectrum_and_su2_write_tables() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["spectrum", "--k-max", "4"]);
    assert!(column(&read(dir.path().join("spectrum.csv")), "rel_err").iter().all(|e| *e <= 1e-8));
    assert!(!bandcorr(dir.path(), &["su2", "--w", "20", "--orders", "16,16,16"]).status.success());
    assert_eq!(bandcorr(dir.path(), &["su2", "--orders", "40,40"]).status.code(), Some(2));
    ok(dir.path(), &["su2", "--w", "20,40", "--ell", "1", "--orders", "40,40,40"]);
    assert_eq!(column(&read(dir.path().join("su2_slopes.csv")), "slope").len(), 1);
}

#[test]
fn blockgate_writes_one_line_per_scenario() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["blockgate", "--scenarios", "5", "--norm-scenarios", "4"]);
    assert_eq!(read(dir.path().join("blockgate.jsonl")).lines().count(), 5);
    assert_eq!(read(dir.path().join("norm.jsonl")).lines().count(), 4);
}

#[test]
fn blockgate_violations_are_rejected() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["blockgate", "--scenarios", "4", "--violate", "2"]);
    for line in read(dir.path().join("blockgate_violations.jsonl")).lines() {
        let row: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(row["hypotheses_hold"][1], false);
        assert!(row["error"].is_string());
    }
}

#[test]
fn verify_selected_criterion_passes() {
    let dir = TempDir::new().unwrap();
    let stdout = ok(dir.path(), &["verify", "--only", "regime-limits,5", "--no-determinism"]);
    assert!(stdout.contains("PASS"));
    let report: serde_json::Value = serde_json::from_str(&read(dir.path().join("verify/report.json"))).unwrap();
    assert_eq!(report["verify"]["criteria"].as_array().map(Vec::len), Some(2));
}

#[test]
fn verify_coarse_truncation_fails() {
    let dir = TempDir::new().unwrap();
    let o = bandcorr(dir.path(), &["verify", "--only", "truncation", "--truncation", "8", "--no-determinism"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn unknown_criterion_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    assert_eq!(bandcorr(dir.path(), &["verify", "--only", "nonsense"]).status.code(), Some(2));
}
