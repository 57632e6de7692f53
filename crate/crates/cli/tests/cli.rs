use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_powerbetti"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_spec(dir: &Path, name: &str, degrees: &str) -> String {
    let o = run(&["rees-ci", "--degrees", degrees, "--format", "structured"]);
    assert!(o.status.success());
    let path = dir.join(name);
    std::fs::write(&path, &o.stdout).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn count_values() {
    for (at, want) in [("9,2", "2"), ("0,0", "1"), ("1,0", "0")] {
        let o = run(&["count", "--degrees", "2,3,6,7", "--at", at]);
        assert!(o.status.success());
        assert_eq!(stdout(&o).trim(), want, "at {at}");
    }
}

#[test]
fn count_from_matrix_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.txt");
    std::fs::write(&path, "1 0 1\n0 1 1\n").unwrap();
    let o = run(&["count", "--matrix", path.to_str().unwrap(), "--at", "2,2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "3");
}

#[test]
fn regions_of_top_tor() {
    let o = run(&["regions", "--degrees", "2,3,6", "--index", "2"]);
    assert!(o.status.success());
    let s = stdout(&o);
    for line in ["mu = 2t+9", "mu = 3t+8", "mu = 6t+5", "P5", "Q5"] {
        assert!(s.contains(line), "missing {line}\n{s}");
    }
}

#[test]
fn regions_of_two_forms() {
    let o = run(&["regions", "--degrees", "1,2", "--index", "1"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("t+2 <= mu <= 2t+1"), "{s}");
}

#[test]
fn regions_of_empty_module() {
    let o = run(&["regions", "--degrees", "1,2", "--index", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn regions_svg_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.svg");
    let o = run(&[
        "regions",
        "--degrees",
        "2,3,6",
        "--index",
        "1",
        "--format",
        "svg",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let svg = std::fs::read_to_string(&out).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polygon").count(), 8);
}

#[test]
fn svg_rejected_elsewhere() {
    let o = run(&["count", "--degrees", "2,3", "--at", "5,2", "--format", "svg"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_passes_on_generated_data() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "s.json", "2,3,6");
    let o = run(&["verify", "--spec", &spec, "--tmax", "15"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(s.contains("PASS oracle-equivalence Tor_1"));
    assert!(!s.contains("FAIL"));
    assert!(s.contains("sha256"));
}

#[test]
fn verify_reports_witness_on_corrupted_data() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_spec(dir.path(), "s.json", "2,3,6");
    let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&good).unwrap()).unwrap();
    let shifts = doc["tor"][1]["shifts"].as_array_mut().unwrap();
    let first = shifts
        .iter_mut()
        .find(|s| s["a"] == serde_json::json!([5, 1]))
        .unwrap();
    first["c"] = serde_json::json!(-1);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&doc).unwrap()).unwrap();
    let o = run(&["verify", "--spec", bad.to_str().unwrap(), "--tmax", "12"]);
    assert_eq!(o.status.code(), Some(1));
    let s = stdout(&o);
    assert!(s.contains("FAIL"), "{s}");
    assert!(s.contains("expected"), "{s}");
}

#[test]
fn verify_warns_below_threshold() {
    let o = run(&["verify", "--degrees", "2,3,6", "--tmax", "0"]);
    let s = stdout(&o) + &stderr(&o);
    assert!(s.to_lowercase().contains("warning"), "{s}");
}

#[test]
fn malformed_input_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, r#"{"generators":[[2,1],[3,1]],"tor":[{"index":0,"shifts":[{"a":[0,0],"c":"x"}]}]}"#).unwrap();
    let o = run(&["verify", "--spec", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("tor[0].shifts[0].c"), "{}", stderr(&o));

    let o = run(&["count", "--degrees", "2,x", "--at", "1,1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["verify", "--spec", "/nonexistent/file.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reproduce_worked_example() {
    let o = run(&["reproduce", "--tmax", "20"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("[1 0 0]\n[0 1 0]"), "{s}");
    assert!(s.contains("mu - 2t >= 0, 3t - mu >= 0"));
    assert!(s.contains("P1+P2+P3-P4"));
    assert!(s.contains("Q2+Q3"));
    assert!(s.contains("R(-8,-1)"));
}

#[test]
fn structured_output_is_deterministic() {
    let a = run(&["chambers", "--degrees", "2,3,6", "--format", "structured"]);
    let b = run(&["chambers", "--degrees", "2,3,6", "--format", "structured"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v.is_object());
}

#[test]
fn hilbert_point_and_csv() {
    let o = run(&["hilbert", "--degrees", "2,3,6", "--at", "12,2"]);
    assert!(stdout(&o).contains("= 1"));
    let o = run(&["hilbert", "--degrees", "2,3,6", "--tmax", "3", "--format", "csv"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().count() > 3);
}
