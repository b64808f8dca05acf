use std::process::{Command, Output};

use jetkernel::scalar::int;
use jetkernel::series::MatrixSeries;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jetkernel")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const COMMANDS: &[&[&str]] = &[
    &["jet-coeffs", "--alpha", "1/2", "--beta", "3/2", "--order", "2", "--trunc", "4"],
    &["jet-coeffs", "--alpha", "1", "--beta", "1", "--gamma", "2", "--trunc", "3", "--oracle"],
    &["irreducibility", "--alpha", "3/2", "--beta", "2", "--order", "3"],
    &["irreducibility", "--alpha", "1", "--beta", "1", "--order", "2", "--numeric"],
    &["curvature", "--alpha", "1", "--beta", "2", "--order", "1", "--at", "0.2,0", "--at", "0.3,0.2"],
    &["cocycle-check", "--alpha", "1", "--beta", "1", "--order", "2", "--trials", "10", "--seed", "7"],
    &["cocycle-check", "--alpha", "1", "--beta", "1/2", "--order", "1", "--trials", "10", "--seed", "7"],
    &["identity-check", "--max-ij", "6"],
    &["wilkins", "--alpha", "1", "--beta", "1", "--terms", "60", "--at", "0.3,0"],
    &["tridisc", "--alpha", "1", "--beta", "9", "--gamma", "16"],
];

#[test]
fn every_command_passes_and_is_deterministic() {
    for args in COMMANDS {
        let (a, b) = (run(args), run(args));
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn output_round_trips() {
    for args in COMMANDS {
        for indent in ["0", "2", "4"] {
            let mut full = args.to_vec();
            full.extend(["--json-indent", indent]);
            let v = json_of(&run(&full));
            let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
            assert_eq!(v, again, "{args:?}");
        }
    }
}

#[test]
fn series_document_parses_back() {
    let out = run(COMMANDS[0]);
    let v = json_of(&out);
    let series = MatrixSeries::from_json(&v["series"]).unwrap();
    assert_eq!(series.to_json(), v["series"]);
    assert_eq!(series.trunc(), 4);
    assert_eq!(series.dim(), 3);
}

#[test]
fn documented_examples() {
    let v = json_of(&run(&["jet-coeffs", "--alpha", "1/1", "--beta", "2/1", "--order", "0", "--trunc", "3"]));
    let s = MatrixSeries::from_json(&v["series"]).unwrap();
    for (k, c) in [1, 3, 6, 10].into_iter().enumerate() {
        assert_eq!(s.entry(k, k, 0, 0), int(c));
    }
    let out = run(&["irreducibility", "--alpha", "1/1", "--beta", "1/1", "--order", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["report"]["verdict"], "irreducible");
    let out = run(&["identity-check", "--max-ij", "6"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["passed"], true);
}

#[test]
fn exit_codes() {
    let fail = run(&["wilkins", "--alpha", "1", "--beta", "1", "--terms", "2", "--at", "0.3,0"]);
    assert_eq!(fail.status.code(), Some(1));
    assert_eq!(json_of(&fail)["passed"], false);
    for bad in [
        &["jet-coeffs", "--alpha", "1", "--beta", "1", "--trunc", "13"][..],
        &["jet-coeffs", "--alpha", "1/0", "--beta", "1"],
        &["jet-coeffs", "--alpha", "-1", "--beta", "1"],
        &["curvature", "--alpha", "1", "--beta", "1", "--at", "0.6,0"],
        &["cocycle-check", "--alpha", "1", "--beta", "1/2", "--mode", "exact", "--trials", "3"],
        &["no-such-command"],
    ] {
        let out = run(bad);
        assert_eq!(out.status.code(), Some(2), "{bad:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn quiet_and_output_file() {
    let path = std::env::temp_dir().join(format!("jetkernel-cli-{}.json", std::process::id()));
    let out = run(&["identity-check", "--max-ij", "3", "--quiet", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written["triples"], 20);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn verify_all_summary() {
    let args = ["verify-all", "--no-timings", "--json-indent", "0"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert_eq!(v["passed"], true);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 12);
    assert!(checks.iter().all(|c| c["passed"] == true && c.get("seconds").is_none()));
    let stderr = String::from_utf8(a.stderr).unwrap();
    assert_eq!(stderr.lines().filter(|l| l.starts_with("PASS")).count(), 12);
}
