use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nilcone(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilcone")).args(args).current_dir(dir).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap()
}

#[test]
fn nonsingular_heisenberg() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("h3.json"),
        r#"{"n": 3, "p": 2, "brackets": [{"i": 1, "j": 2, "k": 3, "c": 1.0}]}"#,
    )
    .unwrap();
    let out = nilcone(&["nonsingular", "--algebra", "h3.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["verdict"], "nonsingular");
    assert_eq!(doc["result"]["epsilon"], 1.0);
    assert_eq!(doc["header"]["tool"], "nilcone");
    assert_eq!(doc["header"]["config_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn broken_antisymmetry_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("bad.json"),
        r#"{"n": 3, "p": 2, "brackets": [{"i": 1, "j": 2, "k": 3, "c": 1.0}, {"i": 2, "j": 1, "k": 3, "c": 1.0}]}"#,
    )
    .unwrap();
    let out = nilcone(&["validate", "--algebra", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "algebra");
    assert_eq!(err["exit_code"], 2);
}

#[test]
fn not_two_step_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("deep.json"),
        r#"{"n": 4, "p": 2, "brackets": [{"i": 1, "j": 2, "k": 3, "c": 1.0}, {"i": 1, "j": 3, "k": 4, "c": 1.0}]}"#,
    )
    .unwrap();
    let out = nilcone(&["validate", "--algebra", "deep.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_json(&out)["message"].as_str().unwrap().contains("2-step"));
}

#[test]
fn budget_exhaustion_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = nilcone(&["wordball", "--lattice", "h3z", "--radius", "30", "--budget", "1000"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"], "bfs");
}

#[test]
fn usage_errors_are_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = nilcone(&["distance", "--algebra", "h3"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "usage");
    let out = nilcone(&["distance", "--algebra", "h3", "--target", "1,2"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn wordball_writes_csv_with_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = nilcone(&["wordball", "--lattice", "h3z", "--gens", "standard", "--radius", "4", "--out", "ball.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["ball_sizes"][1], 5);
    assert_eq!(doc["result"]["ball_sizes"][2], 17);
    let csv = fs::read_to_string(dir.path().join("ball.csv")).unwrap();
    assert!(csv.starts_with("# command=wordball\n"));
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "x1,x2,x3,word_length");
    assert_eq!(rows.len() - 1, doc["result"]["ball_size"].as_u64().unwrap() as usize);
}

#[test]
fn distance_matches_closed_form_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["distance", "--algebra", "h3", "--norm", "l1", "--target", "0,0,1", "--seed", "5", "--out"];
    let a = nilcone(&[&args[..], &["a.json"]].concat(), dir.path());
    let b = nilcone(&[&args[..], &["b.json"]].concat(), dir.path());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    let ta = fs::read(dir.path().join("a.json")).unwrap();
    assert_eq!(ta, fs::read(dir.path().join("b.json")).unwrap());
    let doc: Value = serde_json::from_slice(&ta).unwrap();
    assert!((doc["result"]["upper"].as_f64().unwrap() - 4.0).abs() < 1e-9);
    assert_eq!(doc["header"]["seed"], 5);
}

#[test]
fn generic_distance_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |out: &str| {
        let args = [
            "distance", "--algebra", "free3", "--norm", "l2", "--target", "0.4,-0.3,0.2,0.3,-0.1,0.2", "--restarts", "8", "--segments", "32", "--out", out,
        ];
        assert_eq!(nilcone(&args, dir.path()).status.code(), Some(0));
        fs::read(dir.path().join(out)).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn digest_tracks_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let digest = |norm: &str| {
        let out = nilcone(&["validate", "--algebra", "h3", "--norm", norm], dir.path());
        stdout_json(&out)["header"]["config_digest"].clone()
    };
    assert_eq!(digest("l1"), digest("l1"));
    assert_ne!(digest("l1"), digest("l2"));
}

#[test]
fn abnormal_and_geodesic_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = nilcone(&["abnormal", "--algebra", "rxh3", "--norm", "l1", "--samples", "5000", "--out", "ab.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["abnormal"], true);
    assert!(doc["result"]["residuals"]["ode"].as_f64().unwrap() <= 1e-10);
    let csv = fs::read_to_string(dir.path().join("ab.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("t,x1")));

    let out = nilcone(&["abnormal", "--algebra", "h3", "--samples", "5000"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    let out = nilcone(
        &["geodesic", "--algebra", "h3", "--norm", "l2", "--covector", "1,0,6.283185307179586", "--horizon", "1", "--steps", "64"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let end = &stdout_json(&out)["result"]["endpoint"];
    // one full circle of circumference 1 returns to the centre
    assert!(end[0].as_f64().unwrap().abs() < 1e-6 && end[1].as_f64().unwrap().abs() < 1e-6);
    assert!((end[2].as_f64().unwrap() - 1.0 / (4.0 * std::f64::consts::PI)).abs() < 1e-6);
}

#[test]
fn converge_writes_profile_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("h3z.json"), r#"{"lattice": "h3z", "generators": "standard", "schedule": [4, 6, 8]}"#).unwrap();
    let out = nilcone(&["converge", "--config", "h3z.json", "--out", "run"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["profile.csv", "fit.json", "header.json"] {
        assert!(dir.path().join("run").join(f).is_file(), "{f}");
    }
    let rows = stdout_json(&out)["result"]["profile"]["rows"].as_array().unwrap().len();
    assert_eq!(rows, 3);
}
