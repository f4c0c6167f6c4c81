//! End-to-end checks of the binary: generate, fit, interval, sample, and
//! the experiment runner's exit codes.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_monoreg"))
}

fn count_rows(path: &Path) -> usize {
    std::fs::read_to_string(path).unwrap().lines().count()
}

#[test]
fn gen_fit_ci_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    let out = bin()
        .args([
            "gen", "--dgp", "wright", "--theta", "2", "--n", "200", "--seed", "3", "--out",
        ])
        .arg(&data)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let meta: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("gen emits a JSON metadata line");
    assert_eq!(meta["n"], 200);
    assert!(meta["truth_at_x0"].is_number());
    assert_eq!(count_rows(&data), 201); // header + 200 rows

    let fitted = dir.path().join("fit.csv");
    let out = bin()
        .args(["fit", "--input"])
        .arg(&data)
        .args(["--output"])
        .arg(&fitted)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let diag: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(diag["n"], 200);
    assert!(diag["n_blocks"].as_u64().unwrap() >= 1);
    assert!(count_rows(&fitted) >= 2);

    for method in ["hulc", "subsample", "oracle"] {
        let mut cmd = bin();
        cmd.args(["ci", "--method", method, "--alpha", "0.05", "--input"]).arg(&data);
        if method == "oracle" {
            cmd.args(["--theta", "2", "--law-draws", "200"]);
        }
        let out = cmd.output().unwrap();
        assert!(
            out.status.success(),
            "{method}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let ci: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        let (lo, hi) = (ci["lo"].as_f64().unwrap(), ci["hi"].as_f64().unwrap());
        assert!(lo <= hi, "{method}: [{lo}, {hi}]");
        assert_eq!(ci["level"], 0.95);
    }
}

#[test]
fn sample_limit_emits_draws_and_quantiles() {
    let dir = tempfile::tempdir().unwrap();
    let out_csv = dir.path().join("draws.csv");
    let out = bin()
        .args([
            "sample-limit", "--drift", "wright", "--a", "1", "--theta", "2", "--h0", "0.5",
            "--draws", "100", "--seed", "5", "--emit-quantiles", "0.5,0.9", "--out",
        ])
        .arg(&out_csv)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(count_rows(&out_csv), 101);
    let qs: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let q50 = qs["0.5"].as_f64().unwrap();
    let q90 = qs["0.9"].as_f64().unwrap();
    assert!(q50 < q90);

    // oracle ci can consume the emitted draws file
    let data = dir.path().join("data.csv");
    bin()
        .args(["gen", "--dgp", "wright", "--theta", "2", "--n", "100", "--out"])
        .arg(&data)
        .status()
        .unwrap();
    let out = bin()
        .args(["ci", "--method", "oracle", "--theta", "2", "--input"])
        .arg(&data)
        .args(["--law"])
        .arg(&out_csv)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn experiment_exit_codes_follow_gates() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    let mut cfg = serde_json::json!({
        "study": "boundedness",
        "n_grid": [30, 60],
        "replications": 3,
        "master_seed": 4,
        "out_dir": dir.path().join("out"),
        "asserts": [
            {"cell": "n=30", "stat": "empirical_l2_sup_norm", "max": 7.0}
        ]
    });
    std::fs::write(&cfg_path, cfg.to_string()).unwrap();
    let out = bin().args(["experiment", "--config"]).arg(&cfg_path).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("out/results.csv").exists());
    assert!(dir.path().join("out/manifest.jsonl").exists());

    // an impossible gate flips the exit code to 2
    cfg["asserts"][0]["max"] = serde_json::json!(-1.0);
    std::fs::write(&cfg_path, cfg.to_string()).unwrap();
    let out = bin().args(["experiment", "--config"]).arg(&cfg_path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
