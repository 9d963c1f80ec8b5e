//! End-to-end exercises of the binary: file formats, exit codes, sweeps,
//! and the dimension-guard override.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_sympcode")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sympcode-cli-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn codegen_then_fidelity_pipeline() {
    let subspace = scratch("cat.json");
    std::fs::write(&subspace, r#"{"d": 2, "n": 2, "basis": [[0,1,0,1]]}"#).unwrap();
    let bundle = scratch("cat-code.json");
    let out = Command::new(bin())
        .args([
            "codegen",
            "--subspace",
            subspace.to_str().unwrap(),
            "--seed",
            "5",
            "--out",
            bundle.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["k"], 1);
    assert_eq!(parsed["transversal"][1], serde_json::json!([1, 0, 0, 0]));
    // code subspaces have dimension d^k = 2
    assert_eq!(parsed["vectors"].as_array().unwrap().len(), 4);

    let out = Command::new(bin())
        .args([
            "fidelity",
            "--code",
            bundle.to_str().unwrap(),
            "--bitflip",
            "0.1",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["mode"], "weyl-exact");
    let sim = parsed["report"]["simulated"].as_f64().unwrap();
    let formula = parsed["report"]["formula"].as_f64().unwrap();
    assert!((sim - 0.9).abs() < 1e-10);
    assert!((formula - 0.9).abs() < 1e-10);
}

#[test]
fn codegen_is_deterministic_per_seed() {
    let subspace = scratch("det.json");
    std::fs::write(&subspace, r#"{"d": 3, "n": 2, "basis": [[0,1,0,1]]}"#).unwrap();
    let run = |seed: &str| {
        let out = Command::new(bin())
            .args([
                "codegen",
                "--subspace",
                subspace.to_str().unwrap(),
                "--seed",
                seed,
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run("9"), run("9"));
    assert_ne!(run("9"), run("10"));
}

#[test]
fn fidelity_sweep_emits_requested_rows() {
    let subspace = scratch("sweep-sub.json");
    std::fs::write(&subspace, r#"{"d": 2, "n": 2, "basis": [[0,1,0,1]]}"#).unwrap();
    let bundle = scratch("sweep-code.json");
    assert!(Command::new(bin())
        .args([
            "codegen",
            "--subspace",
            subspace.to_str().unwrap(),
            "--seed",
            "5",
            "--no-vectors",
            "--out",
            bundle.to_str().unwrap(),
        ])
        .output()
        .unwrap()
        .status
        .success());
    let csv_path = scratch("sweep.csv");
    let out = Command::new(bin())
        .args([
            "fidelity",
            "--code",
            bundle.to_str().unwrap(),
            "--sweep",
            "0:0.5:11",
            "--csv",
            csv_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let rows: Vec<&str> = csv.trim().lines().collect();
    assert_eq!(rows.len(), 12, "header plus 11 rows");
    assert_eq!(rows[0], "p,simulated,formula,discrepancy");
    // F = 1 − p along the whole sweep
    let last: Vec<&str> = rows[11].split(',').collect();
    assert!((last[1].parse::<f64>().unwrap() - 0.5).abs() < 1e-10);
}

#[test]
fn distill_reports_trajectory() {
    let out = Command::new(bin())
        .args([
            "distill",
            "--input-werner",
            "0.75",
            "--rounds",
            "2",
            "--accept",
            "0",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let points = parsed["points"].as_array().unwrap();
    assert_eq!(points.len(), 3);
    assert!((points[1]["fidelity"].as_f64().unwrap() - 41.0 / 52.0).abs() < 1e-12);
    assert!((points[1]["success_prob"].as_f64().unwrap() - 13.0 / 18.0).abs() < 1e-12);
    // zero rounds: input unchanged
    let out = Command::new(bin())
        .args(["distill", "--input-werner", "0.6", "--rounds", "0"])
        .output()
        .unwrap();
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["points"].as_array().unwrap().len(), 1);
    assert!((parsed["points"][0]["fidelity"].as_f64().unwrap() - 0.6).abs() < 1e-12);
}

#[test]
fn exponent_on_point_mass_gives_rate_gap() {
    let dist = scratch("delta.json");
    std::fs::write(&dist, r#"{"d": 2, "m": 1, "probs": {"0,0": 1.0}}"#).unwrap();
    let out = Command::new(bin())
        .args([
            "exponent",
            "--dist",
            dist.to_str().unwrap(),
            "--m",
            "1",
            "--rate",
            "0.3",
            "--method",
            "both",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((parsed["value"].as_f64().unwrap() - 0.7).abs() < 1e-9);
    assert!((parsed["threshold"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn bad_inputs_produce_diagnostics_and_nonzero_exit() {
    // Missing file.
    let out = Command::new(bin())
        .args([
            "fidelity",
            "--code",
            "/definitely/not/here.json",
            "--bitflip",
            "0.1",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not/here.json"));

    // Unnormalized distribution file.
    let dist = scratch("bad-dist.json");
    std::fs::write(&dist, r#"{"d": 2, "m": 1, "probs": {"0,0": 0.5}}"#).unwrap();
    let out = Command::new(bin())
        .args([
            "exponent",
            "--dist",
            dist.to_str().unwrap(),
            "--rate",
            "0.5",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not normalized"));

    // Unknown suite.
    let out = Command::new(bin())
        .args(["verify", "--suite", "everything", "--seed", "1"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn verify_invocations_from_the_interface_contract() {
    // Named suite runs with explicit configuration exit zero.
    let out = Command::new(bin())
        .args([
            "verify",
            "--suite",
            "average-law",
            "--d",
            "2",
            "--n",
            "2",
            "--k",
            "1",
            "--seeds",
            "20",
            "--seed",
            "3",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["pass"], true);

    let out = Command::new(bin())
        .args([
            "verify", "--suite", "twirl", "--d", "3", "--n", "1", "--seed", "3",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn identity_channel_file_gives_unit_fidelity() {
    let subspace = scratch("id-sub.json");
    std::fs::write(&subspace, r#"{"d": 2, "n": 2, "basis": [[0,1,0,1]]}"#).unwrap();
    let bundle = scratch("id-code.json");
    assert!(Command::new(bin())
        .args([
            "codegen",
            "--subspace",
            subspace.to_str().unwrap(),
            "--seed",
            "2",
            "--no-vectors",
            "--out",
            bundle.to_str().unwrap(),
        ])
        .output()
        .unwrap()
        .status
        .success());
    // 4x4 identity as a one-Kraus channel file.
    let mut rows = Vec::new();
    for r in 0..4 {
        let mut row = Vec::new();
        for c in 0..4 {
            row.push(if r == c { [1.0, 0.0] } else { [0.0, 0.0] });
        }
        rows.push(row);
    }
    let channel = scratch("id-channel.json");
    std::fs::write(
        &channel,
        serde_json::to_string(&serde_json::json!({"d": 2, "n": 2, "kraus": [rows]})).unwrap(),
    )
    .unwrap();
    let out = Command::new(bin())
        .args([
            "fidelity",
            "--code",
            bundle.to_str().unwrap(),
            "--channel",
            channel.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((parsed["report"]["simulated"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!((parsed["report"]["formula"].as_f64().unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn dimension_guard_is_env_overridable() {
    let subspace = scratch("big.json");
    std::fs::write(&subspace, r#"{"d": 2, "n": 7, "basis": []}"#).unwrap();
    // Default guard refuses d^(2n) = 16384.
    let out = Command::new(bin())
        .args([
            "codegen",
            "--subspace",
            subspace.to_str().unwrap(),
            "--seed",
            "1",
            "--no-vectors",
        ])
        .env_remove("SYMPCODE_MAX_DIM")
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("SYMPCODE_MAX_DIM"));

    // Raising the guard lets the build through.
    let out = Command::new(bin())
        .args([
            "codegen",
            "--subspace",
            subspace.to_str().unwrap(),
            "--seed",
            "1",
            "--no-vectors",
        ])
        .env("SYMPCODE_MAX_DIM", "20000")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["k"], 7);
}
