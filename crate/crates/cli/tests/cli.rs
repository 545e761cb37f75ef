use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn heis(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heis")).current_dir(dir).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let o = heis(dir, args);
    assert!(o.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
    o
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn all_pass(report: &Value) {
    let checks = report["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        assert_eq!(c["pass"], Value::Bool(true), "check failed: {c}");
    }
}

fn square(dir: &Path) {
    std::fs::write(dir.join("square.json"), r#"{"points": [[0,0],[1,0],[1,1],[0,1],[0,0]], "z0": 0}"#).unwrap();
}

#[test]
fn params_prints_eta() {
    let d = tempfile::tempdir().unwrap();
    let o = ok(d.path(), &["params", "--n", "10", "--c", "2", "--json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["eta"], 0.625);
    let text = ok(d.path(), &["params", "--n", "10", "--c", "2"]);
    assert!(String::from_utf8_lossy(&text.stdout).contains("0.625"));
}

#[test]
fn lift_fill_extend_pipeline() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    square(p);
    ok(p, &["lift", "--in", "square.json", "--out", "curve.json", "--close", "--report", "lift.json"]);
    all_pass(&json(&p.join("lift.json")));
    ok(p, &["fill", "--in", "curve.json", "--out", "filling.json", "--eps", "0.5", "--obj", "f.obj", "--report", "fill.json"]);
    let fr = json(&p.join("fill.json"));
    all_pass(&fr);
    assert_eq!(fr["command"], "fill");
    assert!(fr["inputs-digest"].as_str().unwrap().len() == 64);
    let f = json(&p.join("filling.json"));
    assert_eq!(f["triangles"].as_array().unwrap().len(), fr["outputs"]["triangles"].as_u64().unwrap() as usize);
    let text = std::fs::read_to_string(p.join("filling.json")).unwrap();
    let back: heis::filling::FillingFile = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&back).unwrap() + "\n", text);
    ok(p, &["extend", "--in", "curve.json", "--depth", "3", "--n", "4", "--out", "tree.bin", "--report", "extend.json"]);
    all_pass(&json(&p.join("extend.json")));
    let e = ok(p, &["eval", "--tree", "tree.bin", "--x", "1", "--y", "0"]);
    let v: Value = serde_json::from_slice(&e.stdout).unwrap();
    // (1, 0) is the basepoint of the closed square lift
    for k in 0..3 {
        assert!(v["value"][k].as_f64().unwrap().abs() < 1e-9);
    }
    ok(p, &["mesh", "--tree", "tree.bin", "--depth", "1", "--out", "m.obj", "--report", "mesh.json"]);
    all_pass(&json(&p.join("mesh.json")));
    ok(p, &["exponent", "--tree", "tree.bin", "--alpha", "0.3", "--pairs", "200", "--seed", "3", "--report", "exp.json"]);
    let ex = json(&p.join("exp.json"));
    assert_eq!(ex["outputs"]["estimate"]["pairs"], 200);
}

#[test]
fn curve_json_roundtrips_exactly() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    square(p);
    ok(p, &["lift", "--in", "square.json", "--out", "curve.json", "--close"]);
    let text = std::fs::read_to_string(p.join("curve.json")).unwrap();
    let c: heis::HCurve = serde_json::from_str(&text).unwrap();
    let again = serde_json::to_string_pretty(&c).unwrap() + "\n";
    assert_eq!(again, text);
}

#[test]
fn skeleton_and_grid() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    ok(p, &["skeleton", "--n0", "2", "--n", "3", "--box", "1", "--out", "s.obj", "--report", "s.json"]);
    all_pass(&json(&p.join("s.json")));
    let lines = heis::obj::read_polylines(&std::fs::read_to_string(p.join("s.obj")).unwrap()).unwrap();
    assert_eq!(lines.len() as u64, json(&p.join("s.json"))["outputs"]["edges"].as_u64().unwrap());
    ok(p, &["grid", "--d", "3", "--count", "27", "--out", "g.json", "--report", "g-report.json"]);
    all_pass(&json(&p.join("g-report.json")));
    assert_eq!(json(&p.join("g.json"))["balls"].as_array().unwrap().len(), 27);
}

#[test]
fn malformed_input_exits_2_with_field_path() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    std::fs::write(p.join("bad.json"), r#"{"points": [[0, 0], [1, "a"]]}"#).unwrap();
    let o = heis(p, &["lift", "--in", "bad.json", "--out", "x.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("points[1][1]"));
    std::fs::write(p.join("cfg.json"), r#"{"params": {"L": 1.0, "colour": 2}}"#).unwrap();
    let o = heis(p, &["--config", "cfg.json", "params", "--n", "2", "--c", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("params"));
    let o = heis(p, &["params", "--n", "0", "--c", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = heis(p, &["eval", "--tree", "missing.bin", "--x", "0", "--y", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn env_threads_validated() {
    let d = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_heis"))
        .current_dir(d.path())
        .env("HEIS_THREADS", "zero")
        .args(["params", "--n", "2", "--c", "2"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_heis"))
        .current_dir(d.path())
        .env("HEIS_THREADS", "1")
        .args(["params", "--n", "2", "--c", "2"])
        .output()
        .unwrap();
    assert!(o.status.success());
}

#[test]
fn reports_are_deterministic() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    square(p);
    ok(p, &["lift", "--in", "square.json", "--out", "curve.json", "--close"]);
    ok(p, &["extend", "--in", "curve.json", "--depth", "2", "--n", "4", "--out", "tree.bin"]);
    let run = |name: &str| {
        ok(p, &["exponent", "--tree", "tree.bin", "--alpha", "0.3", "--pairs", "300", "--seed", "9", "--report", "r.json"]);
        std::fs::rename(p.join("r.json"), p.join(name)).unwrap();
        std::fs::read(p.join(name)).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
    let a = std::fs::read(p.join("tree.bin")).unwrap();
    ok(p, &["extend", "--in", "curve.json", "--depth", "2", "--n", "4", "--out", "tree.bin"]);
    assert_eq!(a, std::fs::read(p.join("tree.bin")).unwrap());
}
