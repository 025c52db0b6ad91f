//! Drives the installed binary end to end: exit codes, stdout/stderr
//! wiring, artifact layout, and determinism under the --seed flag.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use reef_core::dataset::{export_csv, generate_synthetic, ReefDataset, SchemaConfig};

const BIN: &str = env!("CARGO_BIN_EXE_reef");

/// Synthetic rows wearing the default reef schema, small enough that a
/// handful of full training runs stays fast.
fn write_fixture_csv(path: &Path, n: usize, seed: u64) {
    let p = 18;
    let weights: Vec<f64> = (0..p).map(|j| 0.5 + 0.1 * j as f64).collect();
    let noise_sd = {
        let var_signal: f64 = weights.iter().map(|w| w * w).sum::<f64>() / 3.0;
        (var_signal * (1.0 / 0.91 - 1.0)).sqrt()
    };
    let raw = generate_synthetic(n, p, &weights, 5.0, noise_sd, seed).unwrap();
    let schema = SchemaConfig::default();
    let day_night = schema
        .features
        .iter()
        .position(|f| f == "Day/Night")
        .unwrap();
    let rows: Vec<Vec<f64>> = (0..raw.n_rows())
        .map(|i| {
            let mut row = raw.row(i).to_vec();
            row[day_night] = if row[day_night] > 0.0 { 1.0 } else { 0.0 };
            row
        })
        .collect();
    let renamed = ReefDataset::new(
        schema.features.clone(),
        schema.target.clone(),
        rows,
        raw.targets().to_vec(),
    )
    .unwrap();
    export_csv(&renamed, path).unwrap();
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

#[test]
fn train_prints_the_report_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    write_fixture_csv(&data, 60, 1);
    let out = dir.path().join("run");

    let output = run(&[
        "train",
        "--data",
        data.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));
    let text = stdout(&output);
    for name in [
        "Linear Regression",
        "SVR RBF",
        "Random Forests",
        "Bagging Ensemble",
    ] {
        assert!(text.contains(name), "missing {name} in:\n{text}");
    }
    assert!(text.contains("trained 36 rows / evaluated 24 rows"), "{text}");
    for file in ["report.txt", "report.csv", "manifest.json"] {
        assert!(out.join(file).is_file(), "{file} missing");
    }
    assert!(out.join("models/bagging_ensemble.json").is_file());
}

#[test]
fn seed_flag_overrides_the_config_seed() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    write_fixture_csv(&data, 60, 2);

    let mut reports = Vec::new();
    for (label, seed) in [("a", "7"), ("b", "7"), ("c", "8")] {
        let out = dir.path().join(label);
        let output = run(&[
            "train",
            "--data",
            data.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seed",
            seed,
        ]);
        assert!(output.status.success(), "stderr: {}", stderr(&output));
        reports.push(fs::read(out.join("report.csv")).unwrap());
    }
    assert_eq!(reports[0], reports[1], "same seed must reproduce bytes");
    assert_ne!(reports[0], reports[2], "new seed must change the split");
}

#[test]
fn train_failure_reports_the_stage_and_writes_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    write_fixture_csv(&data, 30, 3);

    // Strip one required column so ingest fails.
    let text = fs::read_to_string(&data).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let drop = header.iter().position(|h| *h == "Flow Rate").unwrap();
    let bad: Vec<String> = text
        .lines()
        .map(|line| {
            line.split(',')
                .enumerate()
                .filter(|(i, _)| *i != drop)
                .map(|(_, v)| v.to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    let bad_path = dir.path().join("bad.csv");
    fs::write(&bad_path, bad.join("\n")).unwrap();

    let out = dir.path().join("run");
    let output = run(&[
        "train",
        "--data",
        bad_path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(!output.status.success());
    let err = stderr(&output);
    assert!(err.contains("ingest") && err.contains("Flow Rate"), "{err}");
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["status"], "failed");
    assert_eq!(manifest["failed_stage"], "ingest");
}

#[test]
fn unreadable_config_still_writes_a_config_stage_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    write_fixture_csv(&data, 30, 4);
    let config = dir.path().join("config.json");
    fs::write(&config, "{ not json").unwrap();
    let out = dir.path().join("run");

    let output = run(&[
        "train",
        "--data",
        data.to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(!output.status.success());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["status"], "failed");
    assert_eq!(manifest["failed_stage"], "config");
}

#[test]
fn predict_round_trips_single_models_and_the_ensemble() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    write_fixture_csv(&data, 60, 5);
    let out = dir.path().join("run");
    let output = run(&[
        "train",
        "--data",
        data.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));

    for slug in ["ridge_regression", "bagging_ensemble"] {
        let pred_dir = dir.path().join(format!("preds_{slug}"));
        let output = run(&[
            "predict",
            "--model",
            out.join(format!("models/{slug}.json")).to_str().unwrap(),
            "--data",
            out.join("test.csv").to_str().unwrap(),
            "--out",
            pred_dir.to_str().unwrap(),
        ]);
        assert!(output.status.success(), "stderr: {}", stderr(&output));
        assert!(stdout(&output).contains("wrote 24 predictions"));
        let text = fs::read_to_string(pred_dir.join("predictions.csv")).unwrap();
        assert_eq!(text.lines().count(), 25, "header plus one per test row");
        assert_eq!(text.lines().next(), Some("prediction"));
        for line in text.lines().skip(1) {
            let value: f64 = line.parse().unwrap();
            assert!(value.is_finite());
        }
    }
}

#[test]
fn predict_rejects_mismatched_columns() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    write_fixture_csv(&data, 60, 6);
    let out = dir.path().join("run");
    let output = run(&[
        "train",
        "--data",
        data.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));

    let bogus = dir.path().join("bogus.csv");
    fs::write(&bogus, "Bogus\n1\n").unwrap();
    let output = run(&[
        "predict",
        "--model",
        out.join("models/linear_regression.json").to_str().unwrap(),
        "--data",
        bogus.to_str().unwrap(),
        "--out",
        dir.path().join("preds").to_str().unwrap(),
    ]);
    assert!(!output.status.success());
    let err = stderr(&output);
    assert!(err.contains("Bogus"), "{err}");
}

#[test]
fn plotdata_writes_one_file_per_numeric_feature() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    write_fixture_csv(&data, 25, 7);
    let out = dir.path().join("plots");

    let output = run(&[
        "plotdata",
        "--data",
        data.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));
    assert!(stdout(&output).contains("wrote 17 plot files"));
    let files: Vec<_> = fs::read_dir(&out).unwrap().collect();
    assert_eq!(files.len(), 17);
    for entry in files {
        let path = entry.unwrap().path();
        assert_eq!(
            fs::read_to_string(&path).unwrap().lines().count(),
            26,
            "{path:?} should hold a header plus one line per row"
        );
    }
}
