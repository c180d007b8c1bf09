use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn config(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    root.join(format!("{name}.json")).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcantor"))
        .args(args)
        .env_remove("QCANTOR_MAX_QUBITS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

#[test]
fn coherent_state_exits_zero() {
    let out = run(&["coherence", "--config", &config("coherence_epr")]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["status"], "ok");
    assert_eq!(report["tool"], "qcantor");
    assert_eq!(report["tolerances"]["tol_entry"], 1e-12);
    assert_eq!(report["config"]["state"]["kind"], "epr");
}

#[test]
fn corrupted_level_is_reported_as_violation() {
    let out = run(&["coherence", "--config", &config("coherence_corrupted")]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    assert_eq!(report["status"], "violation");
    assert_eq!(report["result"]["holds"], false);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("T(rho_3) != rho_2"), "{stderr}");
    assert!(stderr.contains("T(rho_4) != rho_3"), "{stderr}");
}

#[test]
fn tracial_state_passes_prefix_test() {
    let out = run(&["test-eval", "--config", &config("test_eval_tracial")]);
    assert_eq!(out.status.code(), Some(0));
    let result = &json(&out)["result"];
    assert_eq!(result["infimum"], "1/64");
    assert_eq!(result["levels"][3]["value"], "1/8");
    assert_eq!(result["verdicts"][0]["verdict"]["verdict"], "passes_witnessed");
}

#[test]
fn zero_sequence_fails_prefix_test() {
    let out = run(&["test-eval", "--config", &config("test_eval_zeros")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["status"], "violation");
}

#[test]
fn bridge_covers_rotated_sequence() {
    let out = run(&["bridge", "--config", &config("bridge_rotated")]);
    assert_eq!(out.status.code(), Some(0));
    let result = &json(&out)["result"];
    for (r, c) in result["coverage"].as_array().unwrap().iter().enumerate() {
        assert_eq!(c["covered"], true, "level {r}");
        assert_eq!(c["value"], "576/625");
    }
    assert_eq!(result["levels"][2]["measure"], "1/8");
}

#[test]
fn compression_modes() {
    let qc = run(&["compress", "--config", &config("compress_qc")]);
    assert_eq!(qc.status.code(), Some(0));
    assert_eq!(json(&qc)["result"]["record"]["k"], 0);

    let part1 = run(&["compress", "--config", &config("compress_part1")]);
    assert_eq!(part1.status.code(), Some(0));
    let levels = json(&part1)["result"]["levels"].clone();
    assert_eq!(levels[0]["mass"], "1/64");
    assert!(levels.as_array().unwrap().iter().all(|l| l["within_bound"] == true));

    let part2 = run(&["compress", "--config", &config("compress_part2")]);
    assert_eq!(part2.status.code(), Some(0));
    let items = json(&part2)["result"]["items"].clone();
    assert_eq!(items.as_array().unwrap().len(), 3);
    for item in items.as_array().unwrap() {
        let c = &item["compression"];
        assert!(c["record"]["k"].as_u64().unwrap() < c["n"].as_u64().unwrap());
        assert!(c["record"]["achieved_distance"].as_f64().unwrap() <= 0.1f64.sqrt() + 1e-8);
    }
}

#[test]
fn entropy_profiles() {
    let out = run(&["entropy", "--config", &config("entropy_iid")]);
    assert_eq!(out.status.code(), Some(0));
    let h = -(0.25f64 * 0.25f64.log2() + 0.75 * 0.75f64.log2());
    for level in json(&out)["result"]["levels"].as_array().unwrap() {
        assert!((level["rate"].as_f64().unwrap() - h).abs() < 1e-9);
        assert!((level["cross_entropy"].as_f64().unwrap() - h).abs() < 1e-9);
    }
    let undefined = run(&["entropy", "--config", &config("entropy_undefined")]);
    assert_eq!(undefined.status.code(), Some(1));
}

#[test]
fn csv_output_carries_metadata() {
    let out = run(&["coherence", "--config", &config("coherence_epr"), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# tool=qcantor"));
    assert!(lines.next().unwrap().starts_with("# config="));
    assert_eq!(lines.next().unwrap(), "# status=ok");
    assert_eq!(lines.next().unwrap(), "n,deviation,exact");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["compress", "--epsilon", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["coherence", "--depth", "40"]).status.code(), Some(2));
    assert_eq!(run(&["coherence", "--config", "/nonexistent.json"]).status.code(), Some(2));
    let dir = std::env::temp_dir().join(format!("qcantor-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bogus = dir.join("bogus.json");
    std::fs::write(&bogus, r#"{"bogus": 1}"#).unwrap();
    assert_eq!(run(&["coherence", "--config", bogus.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["test-eval", "--delta", "x/y"]).status.code(), Some(2));
}

#[test]
fn reports_are_written_to_file() {
    let dir = std::env::temp_dir().join(format!("qcantor-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = run(&["coherence", "--config", &config("coherence_epr"), "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written["status"], "ok");
}
