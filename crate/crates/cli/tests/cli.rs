use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SCENARIO: &str = r#"{
  "population": [{"id": "A", "size": "omega"}, {"id": "rest", "size": "omega"}, {"id": "f", "size": 2}],
  "worlds": {
    "w": {"A": "2", "rest": "0", "f": "0"},
    "v": {"A": "0", "rest": "1", "f": "0"},
    "x": {"A": "1", "rest": "1", "f": "0"},
    "y": {"A": "0", "rest": "2", "f": "0"}
  },
  "streams": {
    "s": {"prefix": [], "period": ["1", "0"]},
    "t": {"prefix": ["0", "0"], "period": ["0", "1"]}
  }
}"#;

fn swr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swr")).args(args).env_remove("SWR_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scenario(dir: &Path) -> String {
    let path = dir.join("scenario.json");
    fs::write(&path, SCENARIO).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn compare_reports_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario(dir.path());
    let out = swr(&["compare", "--scenario", &s, "--pair", "w,v", "--criterion", "sp"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("Incomparable"));
    assert!(stdout(&out).contains("indeterminate"));

    let out = swr(&["compare", "--scenario", &s, "--pair", "w,v", "--criterion", "spd", "--json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["verdict"], "strictly_better");

    for c in ["sp", "fsp", "pareto", "spd", "cdv"] {
        let out = swr(&["compare", "--scenario", &s, "--pair", "x,x", "--criterion", c]);
        assert!(stdout(&out).contains("Equivalent"), "{c}");
    }

    let out = swr(&["compare", "--scenario", &s, "--pair", "s,t", "--criterion", "ot"]);
    assert!(stdout(&out).contains("StrictlyBetter"));
}

#[test]
fn refute_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario(dir.path());
    let cert = dir.path().join("cert.json");
    let c = cert.to_str().unwrap();
    let out = swr(&["refute", "--scenario", &s, "--pair", "x,y", "--direction", "forward", "--out", c]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("case 2c"));
    let out = swr(&["verify", c]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("valid"));

    let mut doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    doc["steps"].as_array_mut().unwrap().remove(1);
    fs::write(&cert, doc.to_string()).unwrap();
    let out = swr(&["verify", c]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("invalid"));

    let out = swr(&["refute", "--scenario", &s, "--pair", "y,x", "--direction", "backward"]);
    assert_eq!(out.status.code(), Some(0));
    let out = swr(&["refute", "--scenario", &s, "--pair", "x,x"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn replay_all_passes() {
    let out = swr(&["replay", "--all"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert_eq!(stdout(&out).lines().filter(|l| l.starts_with("pass")).count(), 10);
    let out = swr(&["replay", "--name", "vallentyne-gap", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let out = swr(&["replay", "--name", "missing"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn axioms_exit_codes_track_failures() {
    let out = swr(&["axioms", "--criterion", "sp", "--axiom", "strong-pareto", "--trials", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let out = swr(&["axioms", "--criterion", "sp", "--axiom", "completeness", "--trials", "5"]);
    assert_eq!(out.status.code(), Some(1));
    let out = swr(&["axioms", "--axiom", "lv-fact", "--trials", "20", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let reports: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(reports[0]["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn density_is_seeded_csv() {
    let args = ["density", "--generator", "mixed", "--p", "0.4", "--samples", "300", "--csv"];
    let a = Command::new(env!("CARGO_BIN_EXE_swr")).args(args).env("SWR_SEED", "9").output().unwrap();
    let b = swr(&[&args[..], &["--seed", "9"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    let text = stdout(&a);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("criterion,generator,samples"));
    assert_eq!(lines.count(), 5);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(swr(&["compare", "--scenario", "/nonexistent.json", "--pair", "w,v"]).status.code(), Some(2));
    assert_eq!(swr(&["density", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(swr(&["frobnicate"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\n  \"worlds\": {\"w\": {\"A\": \"1\"}}\n}").unwrap();
    let out = swr(&["compare", "--scenario", bad.to_str().unwrap(), "--pair", "w,w"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("worlds.w"));
}
