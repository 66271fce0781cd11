use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn xmarket(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xmarket")).args(args).env_remove("XMARKET_OUT_DIR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_series(dir: &Path, name: &str, start_day: u32, closes: &[f64]) -> String {
    let mut body = String::from("Date,Open,High,Low,Close\n");
    for (i, c) in closes.iter().enumerate() {
        body.push_str(&format!("2025-03-{:02},{c},{},{},{c}\n", start_day as usize + i, c + 1.0, c - 1.0));
    }
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn missing_file_exits_2_and_names_path() {
    let o = xmarket(&["stats", "--csv", "no/such/missing.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no/such/missing.csv"));
    assert!(o.stdout.is_empty());
}

#[test]
fn stats_json_has_every_row() {
    let o = xmarket(&["stats", "--corpus", "aus-daily", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let keys = [
        "Count", "Mean", "Std Dev", "Min", "25%", "Median", "75%", "Max", "Range", "Variance", "Skewness", "Kurtosis",
    ];
    assert_eq!(v.as_object().unwrap().len(), 12);
    for k in keys {
        assert!(v.get(k).is_some(), "{k}");
    }
    assert_eq!(v["Count"], 130);
    assert!(stderr(&o).contains("repeated date"));
}

#[test]
fn stats_text_for_usa() {
    let o = xmarket(&["stats", "--corpus", "usa-daily"]);
    let out = stdout(&o);
    assert!(out.starts_with("Statistic"));
    assert!(out.contains("Mean         5869.25"));
}

#[test]
fn identical_series_correlate_fully() {
    let dir = tempfile::tempdir().unwrap();
    let closes = [10.0, 12.5, 11.0, 14.0, 13.0, 15.5];
    let a = write_series(dir.path(), "a.csv", 3, &closes);
    let b = write_series(dir.path(), "b.csv", 3, &closes);
    let o = xmarket(&["corr", "--csv", &a, "--csv", &b]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 64);
    for r in rows {
        let v: f64 = r.rsplit(',').next().unwrap().parse().unwrap();
        assert!((v - 1.0).abs() < 1e-12, "{r}");
    }
}

#[test]
fn disjoint_dates_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_series(dir.path(), "a.csv", 1, &[1.0, 2.0, 3.0]);
    let b = write_series(dir.path(), "b.csv", 10, &[1.0, 2.0, 3.0]);
    let o = xmarket(&["corr", "--csv", &a, "--csv", &b]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn embedded_correlation_matrix_is_symmetric() {
    let o = xmarket(&["corr", "--format", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let r = v["r"].as_array().unwrap();
    assert_eq!(r.len(), 8);
    for i in 0..8 {
        for j in 0..8 {
            assert_eq!(r[i][j], r[j][i]);
        }
    }
}

#[test]
fn invalid_settings_exit_1_listing_every_problem() {
    let o = xmarket(&["run", "--test-fraction", "1.5", "--svr-c", "-1", "--knn-k", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("strictly between 0 and 1"), "{err}");
    assert!(err.contains("C = -1"), "{err}");
    assert!(err.contains("k"), "{err}");
    assert!(err.lines().count() >= 3, "{err}");
    assert_eq!(xmarket(&["fit-line", "--confidence", "0"]).status.code(), Some(1));
    assert_eq!(xmarket(&["run", "--models", "nope"]).status.code(), Some(1));
}

#[test]
fn run_matches_golden_file() {
    let o = xmarket(&["run", "--corpus", "daily", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0));
    let golden = include_str!("golden/run_daily_seed42.txt");
    assert_eq!(stdout(&o), golden);
    assert!(golden.lines().any(|l| l.starts_with("Model ") && l.contains("Rel. Error Std")));
}

#[test]
fn single_model_chronological_run() {
    let o = xmarket(&["run", "--models", "knn", "--knn-k", "1", "--split", "chronological", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["models"].as_array().unwrap().len(), 1);
    assert_eq!(v["config"]["split"]["mode"], "chronological");
    let csv = stdout(&xmarket(&["run", "--models", "knn", "--format", "csv"]));
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn predictions_written_to_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_xmarket"))
        .args(["run", "--output", "table.txt"])
        .env("XMARKET_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    assert!(dir.path().join("table.txt").exists());
    for name in ["knn", "svr", "linear_svr", "random_forest"] {
        let body = fs::read_to_string(dir.path().join(format!("{name}_predictions.csv"))).unwrap();
        assert!(body.starts_with("date,actual,predicted\n"));
        assert_eq!(body.lines().count(), 25);
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let one = xmarket(&["--threads", "1", "run", "--format", "json"]);
    let four = xmarket(&["--threads", "4", "run", "--format", "json"]);
    let again = xmarket(&["run", "--format", "json"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.stdout, again.stdout);
}

#[test]
fn every_json_output_parses() {
    let cmds: [&[&str]; 7] = [
        &["stats", "--format", "json"],
        &["corr", "--format", "json"],
        &["features", "--format", "json"],
        &["run", "--format", "json", "--trees", "10"],
        &["sweep", "--format", "json", "--seeds", "1,2", "--trees", "10"],
        &["fit-line", "--format", "json"],
        &["manifest"],
    ];
    for args in cmds {
        let o = xmarket(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
        serde_json::from_slice::<Value>(&o.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}"));
    }
}

#[test]
fn linear_data_has_degenerate_band() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_series(dir.path(), "x.csv", 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    let b = write_series(dir.path(), "y.csv", 3, &[12.0, 14.0, 16.0, 18.0, 20.0, 22.0]);
    let o = xmarket(&["fit-line", "--csv", &a, "--csv", &b]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("x,fit,lower,upper\n"));
    for line in out.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert!((v[1] - v[2]).abs() < 1e-9 && (v[1] - v[3]).abs() < 1e-9, "{line}");
    }
}

#[test]
fn weekly_fit_line_slope() {
    let o = xmarket(&["fit-line", "--format", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["slope"].as_f64().unwrap() - 0.9117455977695218).abs() < 1e-9);
    assert!((v["intercept"].as_f64().unwrap() - 2934.571060487585).abs() < 1e-6);
}

#[test]
fn features_csv_shape() {
    let out = stdout(&xmarket(&["features"]));
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "date,A,A_lag_1,A_lag_2,A_lag_3,A_roll_mean_3,A_roll_std_3,target");
    assert_eq!(lines.count(), 122);
}

#[test]
fn manifest_matches_committed_copy() {
    let o = xmarket(&["manifest"]);
    let committed = include_str!("../../core/data/manifest.json");
    assert_eq!(stdout(&o).trim_end(), committed.trim_end());
}

#[test]
fn single_series_rejected_where_pair_needed() {
    let o = xmarket(&["run", "--corpus", "usa-daily"]);
    assert_eq!(o.status.code(), Some(1));
}
