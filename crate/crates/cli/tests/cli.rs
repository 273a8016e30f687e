use std::fs;
use std::path::Path;
use std::process::{Command, Output, Stdio};
use std::io::Write;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ipm-fs"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn write_spec(dir: &Path) -> String {
    let spec = dir.join("spec.json");
    fs::write(
        &spec,
        r#"{"n_per_class": 20, "n_classes": 3, "n_features": 5, "informative": [0, 3], "shift": 2.5, "seed": 7}"#,
    )
    .unwrap();
    spec.display().to_string()
}

fn synth_csv(dir: &Path) -> String {
    let spec = write_spec(dir);
    let out = run(&["synth", "--spec", &spec]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = dir.join("data.csv");
    fs::write(&csv, &out.stdout).unwrap();
    csv.display().to_string()
}

fn report(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn synth_writes_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let csv = fs::read_to_string(synth_csv(dir.path())).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("f0,f1,f2,f3,f4,label"));
    assert_eq!(lines.count(), 60);
}

#[test]
fn synth_rejects_unknown_spec_fields() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.json");
    fs::write(&spec, r#"{"n_per_class": 2, "n_classes": 2, "n_features": 1, "informative": [], "shift": 1, "seed": 0, "colour": 1}"#).unwrap();
    let out = run(&["synth", "--spec", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn every_method_recovers_the_informative_pair() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synth_csv(dir.path());
    for method in ["twd", "fawd", "bewd"] {
        let r = report(&run(&["select", "--input", &csv, "--method", method, "-m", "2"]));
        let mut picked: Vec<u64> = r["selected"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
        picked.sort_unstable();
        assert_eq!(picked, vec![0, 3], "{method}");
        assert_eq!(r["config"]["method"], method);
        assert_eq!(r["dataset"]["rows"], 60);
        assert_eq!(r["dataset"]["sha256"].as_str().unwrap().len(), 64);
        let expected = if method == "twd" { "exact1d" } else { "sinkhorn" };
        assert_eq!(r["config"]["estimator"]["name"], expected);
    }
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synth_csv(dir.path());
    let args = ["select", "--input", &csv, "--method", "bewd", "-m", "2", "--test-frac", "0.25", "--split-seed", "3"];
    let mut a = report(&run(&args));
    let mut b = report(&run(&args));
    a.as_object_mut().unwrap().remove("wall_time_seconds");
    b.as_object_mut().unwrap().remove("wall_time_seconds");
    assert_eq!(a, b);
    let acc = a["evaluation"]["accuracy"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&acc));
    assert_eq!(a["evaluation"]["test_rows"], 15);
}

#[test]
fn reads_stdin_and_writes_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv = fs::read(synth_csv(dir.path())).unwrap();
    let out_path = dir.path().join("report.json");
    let mut child = bin()
        .args(["select", "--method", "fawd", "-m", "1", "--estimator", "mmd", "--sequential"])
        .args(["--out", out_path.to_str().unwrap()])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&csv).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&fs::read_to_string(out_path).unwrap()).unwrap();
    assert_eq!(r["dataset"]["source"], "-");
    assert_eq!(r["config"]["estimator"]["bandwidth"], "median");
    assert!(String::from_utf8_lossy(&out.stderr).contains("fawd (mmd)"));
}

#[test]
fn synth_pipes_into_select() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path());
    let mut synth = bin()
        .args(["synth", "--spec", &spec])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let select = bin()
        .args(["select", "--method", "bewd", "-m", "3", "--no-standardize"])
        .stdin(synth.stdout.take().unwrap())
        .output()
        .unwrap();
    assert!(synth.wait().unwrap().success());
    let r = report(&select);
    assert_eq!(r["selected"].as_array().unwrap().len(), 3);
    assert_eq!(r["eliminated"].as_array().unwrap().len(), 2);
    assert_eq!(r["config"]["standardize"], false);
}

#[test]
fn label_column_by_name_and_index() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("first.csv");
    fs::write(&csv, "y,a,b\np,0,5\nq,0,1\np,1,5\nq,1,1\n").unwrap();
    let csv = csv.to_str().unwrap();
    for col in ["y", "0"] {
        let r = report(&run(&["select", "--input", csv, "--label-col", col, "--method", "twd", "-m", "1", "--no-standardize"]));
        assert_eq!(r["selected_names"][0], "b");
        assert_eq!(r["scores"][0], 32.0);
    }
}

#[test]
fn last_toggle_wins() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synth_csv(dir.path());
    let base = ["select", "--input", csv.as_str(), "--method", "twd", "-m", "1"];
    let raw = report(&run(&[&base[..], &["--standardize", "--no-standardize"]].concat()));
    let z = report(&run(&[&base[..], &["--no-standardize", "--standardize"]].concat()));
    assert_eq!(raw["config"]["standardize"], false);
    assert_eq!(z["config"]["standardize"], true);
    let hdr = report(&run(&[&base[..], &["--no-header", "--header"]].concat()));
    assert_eq!(hdr["dataset"]["rows"], 60);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["select", "--method", "twd"]).status.code(), Some(2));
    assert_eq!(run(&["select", "--method", "twd", "-m", "0"]).status.code(), Some(2));
    assert_eq!(run(&["select", "--method", "lasso", "-m", "1"]).status.code(), Some(2));
    assert_eq!(
        run(&["select", "--method", "twd", "-m", "1", "--test-frac", "0.2"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["select", "--input", "/no/such/file.csv", "--method", "twd", "-m", "1"]);
    assert_eq!(out.status.code(), Some(1));

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "a,b,label\n1,2,x\n3,zz,y\n").unwrap();
    let out = run(&["select", "--input", bad.to_str().unwrap(), "--method", "twd", "-m", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 2"));

    let csv = synth_csv(dir.path());
    let out = run(&["select", "--input", &csv, "--method", "twd", "-m", "9"]);
    assert_eq!(out.status.code(), Some(1));
}
