use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn hypan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypan"))
        .args(args)
        .env("HYPAN_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

fn ok(out: &Output) {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

fn report(p: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn stderr_error(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().find(|l| l.starts_with('{')).expect("error JSON on stderr");
    serde_json::from_str(line).unwrap()
}

#[test]
fn pipeline_is_byte_deterministic() {
    let dir = TempDir::new().unwrap();
    let mut reports = Vec::new();
    for run in 0..2 {
        let sample = path(&dir, &format!("ball{run}.csv"));
        let rep = path(&dir, &format!("report{run}.json"));
        ok(&hypan(&["gen", "--kind", "ball", "--n", "20", "--dim", "3", "--seed", "42", "--out", &sample]));
        ok(&hypan(&[
            "analyze", "--in", &sample, "--checks", "metric,ptolemy,lemma22,delta,epsilon,bolicity", "--r", "1",
            "--eta", "0.1", "--report", &rep,
        ]));
        reports.push(fs::read(&rep).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    let v: Value = serde_json::from_slice(&reports[0]).unwrap();
    for key in ["tool_version", "input_digest", "space_summary", "axiom", "ptolemy", "lemma22", "hyperbolicity", "bolicity"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!(v.get("distortion").is_none());
    assert_eq!(v["space_summary"]["n"], 20);
    assert_eq!(v["input_digest"].as_str().unwrap().len(), 64);
    assert_eq!(v["lemma22"].as_array().unwrap().len(), 20);
    assert_eq!(v["ptolemy"]["is_ptolemy"], true);
    assert_eq!(v["hyperbolicity"]["consistency_ok"], true);
}

#[test]
fn absent_checks_are_absent_keys() {
    let dir = TempDir::new().unwrap();
    let sample = path(&dir, "t.csv");
    let rep = path(&dir, "r.json");
    ok(&hypan(&["gen", "--kind", "tree", "--n", "12", "--seed", "3", "--out", &sample]));
    ok(&hypan(&["analyze", "--in", &sample, "--checks", "delta", "--report", &rep]));
    let v = report(&rep);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys.len(), 4, "{keys:?}");
    let h = &v["hyperbolicity"];
    assert_eq!(h["delta_star"], 0.0);
    assert!(h["epsilon_star"].is_null());
    assert_eq!(h["epsilon_unbounded"], true);
    assert_eq!(h["mode"], "exhaustive");
}

#[test]
fn asymmetric_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let bad = path(&dir, "bad.csv");
    fs::write(&bad, "0,1\n2,0\n").unwrap();
    let rep = path(&dir, "r.json");
    let out = hypan(&["analyze", "--in", &bad, "--checks", "metric", "--report", &rep]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["error"], "AsymmetricInput");
    assert!(!Path::new(&rep).exists());
}

#[test]
fn log_transform_is_strongly_hyperbolic_with_parameter_two() {
    let dir = TempDir::new().unwrap();
    let cloud = path(&dir, "ball.json");
    let log = path(&dir, "log.csv");
    let rep = path(&dir, "r.json");
    ok(&hypan(&["gen", "--kind", "ball", "--n", "40", "--dim", "3", "--seed", "42", "--out", &cloud]));
    ok(&hypan(&["transform", "--in", &cloud, "--kind", "log", "--out", &log]));
    let out = hypan(&[
        "analyze", "--in", &log, "--checks", "epsilon", "--expect-epsilon-min", "1.999999", "--report", &rep,
    ]);
    ok(&out);
    let h = &report(&rep)["hyperbolicity"];
    assert!(h["epsilon_star"].as_f64().unwrap() >= 2.0 - 1e-6);
    assert!(h["delta_star"].as_f64().unwrap() <= std::f64::consts::LN_2 / 2.0 + 1e-9);
}

#[test]
fn failed_expectation_exits_1() {
    let dir = TempDir::new().unwrap();
    let c4 = path(&dir, "c4.csv");
    fs::write(&c4, "0,1,2,1\n1,0,1,2\n2,1,0,1\n1,2,1,0\n").unwrap();
    let rep = path(&dir, "r.json");
    let out = hypan(&["analyze", "--in", &c4, "--checks", "ptolemy", "--expect-ptolemy", "--report", &rep]);
    assert_eq!(out.status.code(), Some(1));
    let p = &report(&rep)["ptolemy"];
    assert_eq!(p["is_ptolemy"], false);
    assert_eq!(p["max_relative_defect"], 1.0);
    assert_eq!(p["witness"]["pairing"], "13|24");
}

#[test]
fn punctured_transforms_drop_the_base() {
    let dir = TempDir::new().unwrap();
    let sample = path(&dir, "s.csv");
    let chi = path(&dir, "chi.csv");
    let rep = path(&dir, "r.json");
    ok(&hypan(&["gen", "--kind", "ball", "--n", "10", "--seed", "1", "--out", &sample]));
    ok(&hypan(&["transform", "--in", &sample, "--kind", "chi", "--base", "4", "--out", &chi]));
    assert_eq!(fs::read_to_string(&chi).unwrap().lines().count(), 9);
    ok(&hypan(&["analyze", "--in", &chi, "--checks", "metric", "--expect-metric", "--report", &rep]));
    let out = hypan(&["transform", "--in", &sample, "--kind", "chi", "--out", &chi]);
    assert_eq!(out.status.code(), Some(2));
    let out = hypan(&["transform", "--in", &sample, "--kind", "Sp", "--base", "10", "--out", &chi]);
    assert_eq!(stderr_error(&out)["error"], "IndexOutOfRange");
}

#[test]
fn hdc_needs_a_boundary_and_flags_small_c() {
    let dir = TempDir::new().unwrap();
    let cloud = path(&dir, "pts.json");
    let boundary = path(&dir, "boundary.json");
    let out_csv = path(&dir, "hdc.csv");
    fs::write(&cloud, r#"{"dim":2,"points":[[0,0],[0.5,0],[0,0.25]]}"#).unwrap();
    let pts: Vec<Vec<f64>> = (0..720)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / 720.0;
            vec![t.cos(), t.sin()]
        })
        .collect();
    fs::write(&boundary, serde_json::json!({ "dim": 2, "points": pts }).to_string()).unwrap();
    let out = hypan(&["transform", "--in", &cloud, "--kind", "hdc", "--out", &out_csv]);
    assert_eq!(out.status.code(), Some(2));
    let out = hypan(&["transform", "--in", &cloud, "--kind", "hdc", "--c", "1.5", "--boundary", &boundary, "--out", &out_csv]);
    ok(&out);
    assert!(String::from_utf8_lossy(&out.stderr).contains("below 2"));
    let first: Vec<f64> = fs::read_to_string(&out_csv).unwrap().lines().next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    let exact = (1.5f64 * 0.5 / 0.5f64.sqrt()).ln_1p();
    assert!((first[1] - exact).abs() < 1e-4);
}

#[test]
fn moebius_reports_distortion() {
    let dir = TempDir::new().unwrap();
    let rep = path(&dir, "m.json");
    ok(&hypan(&["moebius", "--a", "0.5,0,0", "--q-seed", "7", "--pairs", "200", "--report", &rep]));
    let v = report(&rep);
    let d = &v["distortion"];
    assert_eq!(d["bounds_hold"], true);
    assert_eq!(d["pair_count"], 200);
    assert!((d["bound_constant"].as_f64().unwrap() - 0.2876821).abs() < 1e-7);
    assert!(v.get("space_summary").is_none());
    let out = hypan(&["moebius", "--a", "1,0", "--pairs", "5", "--report", &rep]);
    assert_eq!(stderr_error(&out)["error"], "BaseOutsideBall");
}

#[test]
fn bad_arguments_exit_2() {
    let dir = TempDir::new().unwrap();
    let rep = path(&dir, "r.json");
    assert_eq!(hypan(&["analyze", "--checks", "nonsense"]).status.code(), Some(2));
    assert_eq!(hypan(&["gen", "--kind", "ball", "--n", "0", "--out", &rep]).status.code(), Some(2));
    let missing = hypan(&["analyze", "--in", &path(&dir, "none.csv"), "--checks", "metric", "--report", &rep]);
    assert_eq!(stderr_error(&missing)["error"], "Io");
    let out = Command::new(env!("CARGO_BIN_EXE_hypan"))
        .args(["moebius", "--a", "0.1,0", "--pairs", "3", "--report", &rep])
        .env("HYPAN_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
