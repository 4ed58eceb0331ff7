use std::path::Path;
use std::process::{Command, Output};

fn qrep2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrep2")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad json ({e}): {}", stdout(out)))
}

#[test]
fn build_prints_the_artifact() {
    let out = qrep2(&["build", "--p", "1", "--q", "1", "--t", "0.3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["label"]["p"], 1);
    assert_eq!(v["label"]["q"], 1);
    assert_eq!(v["dim"], 8);
    assert_eq!(v["basis"].as_array().unwrap().len(), 8);
    for name in ["h1", "h2", "xp1", "xm1", "xp2", "xm2"] {
        let entries = v["generators"][name].as_array().unwrap();
        assert!(!entries.is_empty(), "{name}");
        assert!(entries[0].get("row").is_some() && entries[0].get("value").is_some());
    }
}

#[test]
fn fundamental_matrices() {
    let v = json(&qrep2(&["build", "--p", "1", "--q", "0", "--t", "0.7"]));
    assert_eq!(v["dim"], 3);
    let xm1 = v["generators"]["xm1"].as_array().unwrap();
    let xm2 = v["generators"]["xm2"].as_array().unwrap();
    assert_eq!(xm1.len(), 1);
    assert_eq!(xm2.len(), 1);
    assert_eq!(xm1[0]["value"].as_f64().unwrap().abs(), 1.0);
    assert_eq!(xm2[0]["value"].as_f64().unwrap().abs(), 1.0);
}

#[test]
fn qdef_is_the_exponential_convention() {
    let a = stdout(&qrep2(&["build", "--p", "2", "--q", "1", "--qdef", "2"]));
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert!((v["t"].as_f64().unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
}

#[test]
fn verify_passes_and_reports_json() {
    let out = qrep2(&["verify", "--p", "2", "--q", "2", "--t", "1", "--json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert!(v["checks"].as_array().unwrap().len() > 10);
    let out = qrep2(&["verify", "--p", "0", "--q", "3", "--t", "0"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("irreducibility"));
}

#[test]
fn rejected_closed_form_fails_verification() {
    let out = qrep2(&["verify", "--p", "2", "--q", "1", "--t", "0.3", "--variant", "closed_form_31"]);
    assert_eq!(code(&out), 1);
    let out = qrep2(&["verify", "--p", "2", "--q", "1", "--t", "0.3", "--variant", "closed_form_4"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["verify", "--p", "1"][..],
        &["build", "--p", "1", "--q", "1", "--t", "-0.5"],
        &["build", "--p", "1", "--q", "1", "--qdef", "0.5"],
        &["build", "--p", "1", "--q", "1", "--t", "0.1", "--qdef", "2"],
        &["build", "--p", "1", "--q", "1", "--variant", "nope"],
        &["frobnicate"],
        &["verify", "--artifact", "/nonexistent/file.json"],
    ] {
        assert_eq!(code(&qrep2(args)), 2, "{args:?}");
    }
}

#[test]
fn matrix_market_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("rep");
    let out = qrep2(&["build", "--p", "2", "--q", "1", "--t", "0.3", "--format", "matrixmarket", "--out", stem.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    for name in ["h1", "h2", "xp1", "xm1", "xp2", "xm2"] {
        let f = dir.path().join(format!("rep.{name}.mtx"));
        let text = std::fs::read_to_string(&f).unwrap();
        assert!(text.starts_with("%%MatrixMarket matrix coordinate real general"), "{name}");
    }
    let out = qrep2(&["verify", "--artifact", stem.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
}

fn corrupt(path: &Path) {
    // flip one lowering entry in the JSON artifact
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let e = &mut v["generators"]["xm1"][0]["value"];
    *e = serde_json::json!(e.as_f64().unwrap() * 1.01);
    std::fs::write(path, serde_json::to_string(&v).unwrap()).unwrap();
}

#[test]
fn corrupted_json_artifact_fails() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rep.json");
    let out = qrep2(&["build", "--p", "2", "--q", "2", "--t", "0.3", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(code(&qrep2(&["verify", "--artifact", path.to_str().unwrap()])), 0);
    corrupt(&path);
    let out = qrep2(&["verify", "--artifact", path.to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["passed"], false);
}

#[test]
fn diagram_lists_points() {
    let out = qrep2(&["diagram", "--p", "1", "--q", "1", "--json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let text = v.to_string();
    assert!(text.contains("seam"), "{text}");
    let table = stdout(&qrep2(&["diagram", "--p", "2", "--q", "0"]));
    assert!(table.contains("dimension 6"), "{table}");
}

#[test]
fn swapped_label_is_the_mirror() {
    let a = json(&qrep2(&["build", "--p", "2", "--q", "1", "--t", "0.3"]));
    let b = json(&qrep2(&["build", "--p", "1", "--q", "2", "--t", "0.3"]));
    assert_eq!(a["dim"], b["dim"]);
    assert_eq!(b["label"]["p"], 1);
    assert_eq!(code(&qrep2(&["verify", "--p", "1", "--q", "2", "--t", "0.3"])), 0);
}

#[test]
fn compare_agrees_with_the_oracle() {
    let out = qrep2(&["compare", "--p", "2", "--q", "1", "--t", "0.3"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("closed_form_4"), "{text}");
    assert!(!text.contains("fail"), "{text}");
    let out = qrep2(&["compare", "--p", "2", "--q", "2", "--t", "1", "--json"]);
    assert_eq!(code(&out), 0);
    json(&out);
}
