//! End-to-end tests of the CLI surface: exit codes, report formats, output
//! files, and determinism of the JSON reports.

use std::process::{Command, Output};

fn jetgeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jetgeo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn verify_passes_with_exit_zero() {
    let out = jetgeo(&[
        "verify",
        "theorem1",
        "--model",
        "heisenberg:n=1",
        "--samples",
        "8",
    ]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("overall: PASS"));
    assert!(stdout.contains("lambda"));
}

#[test]
fn json_report_carries_lambda_six() {
    let out = jetgeo(&[
        "verify",
        "theorem1",
        "--model",
        "heisenberg:n=1",
        "--samples",
        "8",
        "--format",
        "json",
    ]);
    assert_eq!(exit_code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("valid json");
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["overall_pass"], true);
    let lambda = v["constants"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "lambda")
        .expect("lambda constant");
    assert!((lambda["value"].as_f64().unwrap() - 6.0).abs() < 1e-9);
}

#[test]
fn unattainable_tolerance_exits_one() {
    let out = jetgeo(&[
        "verify",
        "theorem1",
        "--model",
        "heisenberg:n=1",
        "--samples",
        "4",
        "--tolerance",
        "1e-30",
    ]);
    assert_eq!(exit_code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("overall: FAIL"));
}

#[test]
fn unknown_model_and_suite_exit_two() {
    let out = jetgeo(&["verify", "theorem1", "--model", "torus:n=1"]);
    assert_eq!(exit_code(&out), 2);
    let out = jetgeo(&["verify", "theorem9", "--model", "heisenberg:n=1"]);
    assert_eq!(exit_code(&out), 2);
    // suite/model mismatch is a usage error too
    let out = jetgeo(&["verify", "pde", "--model", "random:dim=3,seed=1"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn low_jet_order_exits_three() {
    let out = jetgeo(&[
        "verify",
        "theorem1",
        "--model",
        "heisenberg:n=1",
        "--samples",
        "4",
        "--jet-order",
        "2",
    ]);
    assert_eq!(exit_code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("jet order"));
}

#[test]
fn universal_suite_reports_commutation_tags() {
    let out = jetgeo(&[
        "verify",
        "universal",
        "--model",
        "random:dim=3,seed=7",
        "--samples",
        "6",
        "--format",
        "json",
    ]);
    assert_eq!(exit_code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let tags: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter_map(|c| c["equation"].as_str())
        .collect();
    assert!(tags.contains(&"eq10"));
    assert!(tags.contains(&"eq13"));
}

#[test]
fn output_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("jetgeo-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = jetgeo(&[
        "verify",
        "axioms",
        "--model",
        "heisenberg:n=1",
        "--samples",
        "4",
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let body = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["suite"], "axioms");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_json_is_deterministic() {
    let args = [
        "verify",
        "lemma1",
        "--model",
        "heisenberg-deformed:n=1,a=2",
        "--samples",
        "6",
        "--seed",
        "9",
        "--format",
        "json",
    ];
    let a = jetgeo(&args);
    let b = jetgeo(&args);
    assert_eq!(exit_code(&a), 0);
    assert_eq!(a.stdout, b.stdout, "identical config must give identical bytes");
}

#[test]
fn report_matrix_contains_not_applicable_markers() {
    let out = jetgeo(&["report-matrix", "--samples", "4", "--format", "json"]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["overall_pass"], true);
    let cells = v["cells"].as_array().unwrap();
    let na = cells
        .iter()
        .find(|c| c["model"] == "random:dim=3,seed=7" && c["suite"] == "theorem1")
        .unwrap();
    assert_eq!(na["outcome"]["kind"], "not_applicable");
    // coverage spans a wide equation range
    assert!(v["coverage"].as_array().unwrap().len() >= 25);
}
