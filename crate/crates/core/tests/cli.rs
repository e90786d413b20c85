use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cubicjac"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn");
    if let Some(text) = stdin {
        child
            .stdin
            .take()
            .unwrap()
            .write_all(text.as_bytes())
            .unwrap();
    }
    child.wait_with_output().expect("wait")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json output")
}

const FORM_II: &str = "H1 = x4*x3*x1 - x4^2*x2\nH2 = x3^2*x1 - x3*x4*x2\nH3 = 0\nH4 = 0\n";

#[test]
fn reads_standard_input() {
    let out = run(&["--json", "keller", "-"], Some(FORM_II));
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["result"]["variant"], "FORM_II_EXCEPTIONAL");
    assert!(v["transcript"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));
}

#[test]
fn reads_files() {
    let path = std::env::temp_dir().join(format!("cubicjac-cli-{}.txt", std::process::id()));
    std::fs::write(&path, FORM_II).unwrap();
    let out = run(&["--json", "invert", path.to_str().unwrap()], None);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        json(&out)["result"]["G"][0],
        "-1*x1^1*x3^1*x4^1 + 1*x2^1*x4^2 + 1*x1^1"
    );
}

#[test]
fn exit_codes_follow_error_class() {
    assert_eq!(
        run(&["rank", "--map", "H1 = x1^^2"], None).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["invert", "--map", "H1 = x1^3; H2 = 0"], None)
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run(&["rank", "/nonexistent/map.txt"], None).status.code(),
        Some(1)
    );
    assert_eq!(
        run(
            &["classify", "--map", "H1 = x1^3; H2 = x2^3; H3 = x3^3"],
            None
        )
        .status
        .code(),
        Some(3)
    );
    assert_eq!(run(&["frobnicate"], None).status.code(), Some(2));
}

#[test]
fn json_errors_carry_the_exit_code() {
    let out = run(&["--json", "invert", "--map", "H1 = x1^3; H2 = 0"], None);
    let code = out.status.code().unwrap();
    assert_ne!(code, 0);
    assert_eq!(json(&out)["error"]["exit_code"], code);
}

#[test]
fn field_flag_overrides() {
    let out = run(
        &[
            "--json",
            "--field",
            "F5",
            "degmat",
            "--map",
            "H1 = x1^3*x2; H2 = x1*x2^2",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["field"], "F5");
    assert_eq!(v["result"]["anomalous"], true);
    assert_eq!(v["result"]["det_over_z"], "5");
}

#[test]
fn tame_steps_and_parameters() {
    let out = run(&["--json", "tame", "--map", "H1 = x2^3; H2 = 0"], None);
    let v = json(&out);
    assert_eq!(v["result"]["steps"][0]["index"], 1);
    assert_eq!(v["result"]["steps"][0]["shift"], "1*x2^3");

    // x3 is a parameter: F = (x1 + x3 x2^2, x2)
    let out = run(
        &[
            "--json",
            "invert",
            "--params",
            "1",
            "--map",
            "F1 = x1 + x3*x2^2; F2 = x2; F3 = x3",
        ],
        None,
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(json(&out)["result"]["G"][0], "-1*x2^2*x3^1 + 1*x1^1");
}

#[test]
fn anomaly_search_streams_lines() {
    let out = run(
        &[
            "--json", "anomaly", "search", "--n", "2", "--maxdeg", "4", "--p", "5",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let summary = lines.last().unwrap();
    assert_eq!(
        summary["result"]["found"].as_u64().unwrap() as usize,
        lines.len() - 1
    );
    assert!(lines.len() > 1);
}
