use std::process::{Command, Output};

use serde_json::Value;

fn sphera(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sphera"))
        .args(args)
        .env_remove("SPHERA_TOL")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = sphera(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

#[test]
fn transform_matches_three_pi_ln_three() {
    let doc = json(&["f", "--k", "2", "--R", "1", "--r", "0.5", "--xi", "1", "--zeta", "0"]);
    let w = doc["result"]["W"].as_f64().unwrap();
    assert!((w - 3.0 * std::f64::consts::PI * 3f64.ln()).abs() <= 1e-9);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["command"], "f");
    assert_eq!(doc["inputs"]["tol"], 1e-10);
    assert_eq!(doc["result"]["strip_halfwidth"]["finite"], true);
}

#[test]
fn omega_of_a_radial_pair() {
    let doc = json(&["omega", "--x", "0.5,0,0", "--y", "1,0,0"]);
    assert_eq!(doc["result"]["omega"].as_f64().unwrap(), 3.0);
}

#[test]
fn default_suite_passes() {
    let out = sphera(&["verify", "--k", "2", "--R", "1", "--r", "0.5", "--suite", "default"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("passed"));
}

#[test]
fn exit_codes_follow_failure_kind() {
    // invalid input
    assert_eq!(sphera(&["f", "--k", "2", "--R", "1", "--r", "-1", "--xi", "1"]).status.code(), Some(1));
    assert_eq!(sphera(&["f", "--bogus"]).status.code(), Some(1));
    assert_eq!(sphera(&["omega", "--x", "1,0", "--y", "1,0"]).status.code(), Some(1));
    // numerical failure: no real root below the minimum
    assert_eq!(sphera(&["solve", "--k", "2", "--R", "1", "--r", "0.5", "--nu", "1"]).status.code(), Some(2));
    // numerical failure: budget exhausted before the tolerance is met
    let nc = sphera(&[
        "f", "--k", "2", "--R", "1", "--r", "0.99", "--xi", "1", "--zeta", "3", "--max-evals", "100", "--tol", "1e-14",
    ]);
    assert_eq!(nc.status.code(), Some(2));
    assert_eq!(sphera(&["--help"]).status.code(), Some(0));
}

#[test]
fn environment_tolerance_is_used_and_validated() {
    let run = |tol: &str| {
        Command::new(env!("CARGO_BIN_EXE_sphera"))
            .args(["f", "--k", "2", "--R", "1", "--r", "0.5", "--xi", "1", "--format", "json"])
            .env("SPHERA_TOL", tol)
            .output()
            .unwrap()
    };
    let ok = run("1e-8");
    let doc: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(doc["inputs"]["tol"], 1e-8);
    assert!(doc["replay"].as_array().unwrap().iter().any(|a| a == "1e-8"));
    assert_eq!(run("tiny").status.code(), Some(1));
}

#[test]
fn json_replay_reproduces_the_document() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("first.json");
    let out = sphera(&[
        "trace", "--k", "2", "--R", "1", "--r", "0.5", "--a", "1.5", "--b-frac", "0.4", "--format", "json", "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let first = std::fs::read_to_string(&path).unwrap();
    let doc: Value = serde_json::from_str(&first).unwrap();
    let replay: Vec<String> = doc["replay"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a.as_str().unwrap().to_string())
        .collect();
    assert!(!replay.iter().any(|a| a == "-o"));
    let args: Vec<&str> = replay.iter().map(String::as_str).collect();
    let second = sphera(&args);
    assert_eq!(String::from_utf8(second.stdout).unwrap(), first);
}

#[test]
fn trace_csv_is_monotone() {
    let out = sphera(&["trace", "--k", "2", "--R", "1", "--r", "0.5", "--a", "1.5", "--b-frac", "0.4", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "t,v,W_residual,I");
    let t = column(&text, "t");
    let v = column(&text, "v");
    let i = column(&text, "I");
    assert!(t.len() > 2);
    assert!(t.windows(2).all(|w| w[1] >= w[0]));
    assert!(v.windows(2).all(|w| w[1] > w[0]));
    assert!(i.windows(2).all(|w| w[1] > w[0]));
    assert!(column(&text, "W_residual").iter().all(|r| r.abs() <= 1e-8));
}

#[test]
fn degenerate_corner_gives_one_row() {
    let out = sphera(&["trace", "--k", "2", "--R", "1", "--r", "0.5", "--a", "1", "--b-frac", "1", "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 2);
}

#[test]
fn csv_shapes_of_other_commands() {
    let header = |args: &[&str]| {
        let mut all = args.to_vec();
        all.extend(["--format", "csv"]);
        let out = sphera(&all);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap().lines().next().unwrap().to_string()
    };
    let setup = ["--k", "2", "--R", "1", "--r", "0.5"];
    let with = |cmd: &str, rest: &[&'static str]| {
        let mut v = vec![cmd.to_string()];
        v.extend(setup.iter().map(|s| s.to_string()));
        v.extend(rest.iter().map(|s| s.to_string()));
        v
    };
    for (args, expected) in [
        (with("signmap", &["--n-xi", "5", "--n-zeta", "3"]), "xi,zeta,I,abs_error,sign"),
        (with("taylor", &["--order", "3"]), "m,coeff,abs_error"),
        (with("f", &["--xi-from", "0", "--xi-to", "2", "--points", "3"]), "xi,zeta,W,I,abs_error,evals"),
        (with("picard", &["--beta-xi", "2.5", "--beta-zeta", "0.3", "--rho", "3"]), "re,im,residual,in_strip,origin"),
    ] {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(header(&refs), expected);
    }
    let limits = header(&["limits", "--variant", "on-sphere", "--y", "0,0,1"]);
    assert_eq!(limits, "index,distance,omega,l");
}

#[test]
fn limits_report_extended_values() {
    let doc = json(&["limits", "--variant", "straight-line", "--y", "0,2", "--gamma0", "1.0"]);
    assert_eq!(doc["result"]["limit"], serde_json::json!({ "finite": false, "sign": 1 }));
    let doc = json(&["limits", "--variant", "tangent-plane", "--y", "0,0,2"]);
    assert_eq!(doc["result"]["limit"], serde_json::json!({ "finite": true, "value": 1.0 }));
}

#[test]
fn unwritable_output_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.json");
    let out = sphera(&["omega", "--x", "0.5,0", "--y", "1,0", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!path.exists());
}
