//! The `efc` binary: exit codes, report shape, determinism, round trips.

use std::process::Command;

use efc_core::cli::inputs::measure_canonical;
use efc_core::fixtures;
use serde_json::Value;

fn efc(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_efc")).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("utf8"),
        String::from_utf8(out.stderr).expect("utf8"),
    )
}

fn report(args: &[&str]) -> Value {
    let (code, out, err) = efc(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    serde_json::from_str(&out).expect("report is JSON")
}

const EX3D_MEMBER: &str = r#"{"chain":[["0","0","1"],["1","0","0"]],"theta":["0","0","0"]}"#;

#[test]
fn report_keys_in_order() {
    let (_, out, _) = efc(&["-m", "seg", "inspect"]);
    let keys = ["\"command\"", "\"inputs_digest\"", "\"values\"", "\"witness\"", "\"diagnostics\"", "\"precision\"", "\"seed\""];
    let pos: Vec<usize> = keys.iter().map(|k| out.find(k).unwrap_or_else(|| panic!("missing {k}"))).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{out}");
}

#[test]
fn vardist_example() {
    let r = report(&["-m", "seg", "eval", "--what", "vardist", "--member", r#"{"theta":["0"]}"#, "--other", r#"{"chain":[["1"]],"theta":["0"]}"#]);
    assert_eq!(r["values"]["vardist"], serde_json::json!(["1", "1"]));
}

#[test]
fn negative_verdict_exits_zero() {
    let r = report(&["-m", "ex3d", "closure", "--kind", "ri", "--member", EX3D_MEMBER, "--xi", "theta"]);
    assert_eq!(r["decision"]["value"], Value::Bool(false));
    assert_eq!(r["decision"]["failing_step"], 2);
    let r = report(&["-m", "ex3d", "closure", "--kind", "v", "--member", EX3D_MEMBER]);
    assert_eq!(r["decision"]["value"], Value::Bool(true));
}

#[test]
fn invalid_input_exits_two() {
    let float = r#"{"dimension":1,"atoms":[{"point":["0"],"weight":"0.5"}]}"#;
    let (code, out, err) = efc(&["-m", float, "inspect"]);
    assert_eq!(code, 2);
    assert!(out.is_empty() && err.contains("rationals only"), "{err}");
    let heavy = r#"{"dimension":1,"rays":[{"base":["0"],"step":["1"],"rho":"1","alpha":"1","scale":"1"}]}"#;
    let (code, _, err) = efc(&["-m", heavy, "inspect"]);
    assert_eq!(code, 2);
    assert!(err.contains("infinite total mass"), "{err}");
    assert_eq!(efc(&["-m", "nope", "inspect"]).0, 2);
    assert_eq!(efc(&["-m", "seg", "frobnicate"]).0, 2);
    assert_eq!(efc(&["-m", "seg", "eval", "--what", "pmf", "--member", r#"{"theta":["1","2"]}"#, "--at", r#"["0"]"#]).0, 2);
}

#[test]
fn unsupported_exits_three() {
    let (code, _, err) = efc(&["-m", "ex3d", "faces", "--enumerate"]);
    assert_eq!(code, 3, "{err}");
    let e: Value = serde_json::from_str(&err).unwrap();
    assert_eq!(e["error"]["exit_code"], 3);
}

#[test]
fn precision_exits_four() {
    let (code, _, err) = efc(&["-m", "ray", "--precision", "1e-300", "eval", "--what", "logpartition", "--theta", r#"["0","0"]"#]);
    assert_eq!(code, 4, "{err}");
}

#[test]
fn deterministic_reports() {
    let args = ["-m", "tri", "verify", "--suite", "pinsker", "--trials", "20", "--seed", "11"];
    let (a, b) = (efc(&args), efc(&args));
    assert_eq!(a, b);
    let r: Value = serde_json::from_str(&a.1).unwrap();
    assert_eq!(r["seed"], 11);
    assert_eq!(r["decision"]["all_pass"], Value::Bool(true));
    let other = efc(&["-m", "tri", "verify", "--suite", "pinsker", "--trials", "20", "--seed", "12"]);
    assert_ne!(a.1, other.1);
}

#[test]
fn measure_files_round_trip() {
    let dir = std::env::temp_dir().join(format!("efc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for name in fixtures::NAMES {
        let path = dir.join(format!("{name}.json"));
        std::fs::write(&path, measure_canonical(&fixtures::by_name(name).unwrap())).unwrap();
        let from_file = report(&["-m", path.to_str().unwrap(), "inspect"]);
        let from_name = report(&["-m", name, "inspect"]);
        assert_eq!(from_file["inputs_digest"], from_name["inputs_digest"]);
        assert_eq!(from_file["values"], from_name["values"]);
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn limit_and_extension() {
    let seq: Vec<[String; 2]> = (1..=50).map(|n| [n.to_string(), (-n).to_string()]).collect();
    let seq = serde_json::to_string(&seq).unwrap();
    let r = report(&["-m", "tri", "limit", "--sequence", &seq]);
    assert_eq!(r["values"]["alternative"], "Boundary");
    assert_eq!(r["values"]["limit"]["face_dim"], 0);
    let r = report(&["-m", "tri", "extension"]);
    assert_eq!(r["values"]["count"], 7);
}

#[test]
fn inspect_ray_domain() {
    let r = report(&["-m", "ray", "inspect"]);
    assert_eq!(r["values"]["domain"], serde_json::json!([["1*t1 <= 0"]]));
}
