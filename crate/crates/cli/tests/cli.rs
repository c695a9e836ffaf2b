use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn mflat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mflat")).args(args).output().expect("run mflat")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn run_to(dir: &TempDir, sub: &str, args: &[&str]) -> (i32, Value) {
    let out = dir.path().join(sub);
    let mut full = vec![sub];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", out.to_str().unwrap()]);
    let o = mflat(&full);
    let stem = sub.replace('-', "_");
    (code(&o), read_json(&out.join(format!("{stem}.json"))))
}

#[test]
fn diagnose_gevrey_is_strongly_regular() {
    let dir = TempDir::new().unwrap();
    let (c, j) = run_to(&dir, "diagnose", &["--family", "gevrey", "--alpha", "1", "--horizon", "1000000"]);
    assert_eq!(c, 0);
    let cond = &j["conditions"];
    assert_eq!(cond["lc"]["holds_up_to_horizon"], true);
    assert_eq!(cond["mg"]["bounded_trend"], true);
    assert_eq!(cond["snq"]["bounded_trend"], true);
    assert!((j["indices"]["omega_estimate"].as_f64().unwrap() - 1.0).abs() < 1e-3);
    let csv = std::fs::read_to_string(dir.path().join("diagnose/regvar.csv")).unwrap();
    assert!(csv.starts_with("ell,p,ratio,target,pass"));
}

#[test]
fn diagnose_q_square_fails_moderate_growth() {
    let dir = TempDir::new().unwrap();
    let (c, j) = run_to(&dir, "diagnose", &["--family", "q-square", "--q", "2"]);
    assert_eq!(c, 2, "the index does not stabilize for q-square");
    assert_eq!(j["conditions"]["mg"]["bounded_trend"], false);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&mflat(&["diagnose", "--family", "gevrey"])), 1);
    assert_eq!(code(&mflat(&["quasi", "--family", "gevrey", "--alpha", "1", "--gamma", "0"])), 1);
    assert_eq!(code(&mflat(&["quasi", "--family", "gevrey", "--alpha", "1", "--gamma", "-1"])), 1);
    assert_eq!(code(&mflat(&["frobnicate"])), 1);
    assert_eq!(code(&mflat(&["type-profile", "--gamma", "2", "--svg"])), 1);
    assert_eq!(code(&mflat(&["--help"])), 0);
}

#[test]
fn quasi_trichotomy_at_the_index() {
    let dir = TempDir::new().unwrap();
    let base = ["--family", "gevrey", "--alpha", "1", "--gamma", "1"];
    let (c, j) = run_to(&dir, "quasi", &[&base[..], &["--class", "uniform"]].concat());
    assert_eq!(c, 0);
    assert_eq!(j["results"][0]["verdict"], "quasianalytic");
    std::fs::remove_dir_all(dir.path().join("quasi")).unwrap();
    let (c, j) = run_to(&dir, "quasi", &[&base[..], &["--class", "regions"]].concat());
    assert_eq!(c, 0);
    assert_eq!(j["results"][0]["verdict"], "not_quasianalytic");
}

#[test]
fn type_profile_rows_and_plateau() {
    let dir = TempDir::new().unwrap();
    let (c, _) = run_to(&dir, "type-profile", &["--k", "1", "--gamma", "2", "--theta0", "0", "--r0", "1", "--n", "181"]);
    assert_eq!(c, 0);
    let csv = std::fs::read_to_string(dir.path().join("type-profile/type_profile.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 181);
    let plateau: Vec<&&str> = rows.iter().filter(|r| r.ends_with(",plateau")).collect();
    assert!(!plateau.is_empty());
    assert!(plateau.iter().all(|r| r.split(',').nth(1) == Some("1")));
}

#[test]
fn propagate_rows_within_bound() {
    let dir = TempDir::new().unwrap();
    let (c, j) = run_to(&dir, "propagate", &["--function", "exp-flat", "--family", "gevrey", "--alpha", "1", "--gamma", "0.9"]);
    assert_eq!(c, 0);
    let rows = j["table"]["rows"].as_array().unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r["satisfied"] == true));
}

#[test]
fn wasow_detects_oscillation() {
    let dir = TempDir::new().unwrap();
    let (c, j) = run_to(&dir, "wasow", &[]);
    assert_eq!(c, 0);
    assert_eq!(j["oscillation_detected"], true);
}

#[test]
fn pl_check_recipe_and_control() {
    let dir = TempDir::new().unwrap();
    let (c, j) = run_to(&dir, "pl-check", &["--recipe", "--boundary-n", "300", "--interior-n", "2000"]);
    assert_eq!(c, 0);
    assert_eq!(j["check"]["satisfied"], true);
    std::fs::remove_dir_all(dir.path().join("pl-check")).unwrap();
    let (c, j) = run_to(&dir, "pl-check", &["--function", "exp-inverse", "--boundary-n", "300", "--interior-n", "2000"]);
    assert_eq!(c, 0);
    assert_eq!(j["check"]["satisfied"], false);
}

#[test]
fn extend_aborts_when_unbounded() {
    assert_eq!(code(&mflat(&["extend", "--function", "wasow"])), 2);
    let dir = TempDir::new().unwrap();
    let (c, j) = run_to(&dir, "extend", &[]);
    assert_eq!(c, 0);
    assert_eq!(j["table"]["success"], true);
}

#[test]
fn config_overrides_flags() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "horizon = 20000\n[diagnose]\nalpha = 2\n[quasi]\ngamma = 5\n").unwrap();
    let out = dir.path().join("d");
    let o = mflat(&[
        "diagnose", "--family", "gevrey", "--alpha", "1", "--horizon", "1000",
        "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let j = read_json(&out.join("diagnose.json"));
    assert_eq!(j["conditions"]["horizon"], 20000);
    assert!((j["indices"]["omega_estimate"].as_f64().unwrap() - 2.0).abs() < 1e-3);

    std::fs::write(&cfg, "[diagnose]\nalpah = 2\n").unwrap();
    let o = mflat(&["diagnose", "--family", "gevrey", "--alpha", "1", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpah"));

    std::fs::write(&cfg, "[diagnose\n").unwrap();
    assert_eq!(code(&mflat(&["diagnose", "--config", cfg.to_str().unwrap()])), 1);
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let mut bodies = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let o = mflat(&["propagate", "--out", out.to_str().unwrap(), "--svg"]);
        assert_eq!(code(&o), 0);
        let mut names: Vec<_> = std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().path()).collect();
        names.sort();
        bodies.push(names.iter().map(|p| std::fs::read(p).unwrap()).collect::<Vec<_>>());
    }
    assert_eq!(bodies[0].len(), 4);
    assert_eq!(bodies[0], bodies[1]);
}

#[test]
fn custom_sequence_file() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("seq.txt");
    // log M_p = log p!
    let mut acc = 0.0f64;
    let mut text = String::from("0\n");
    for p in 1..2000 {
        acc += (p as f64).ln();
        text += &format!("{acc:.17e}\n");
    }
    std::fs::write(&file, text).unwrap();
    let (c, j) = run_to(&dir, "diagnose", &["--family", "custom", "--custom-file", file.to_str().unwrap()]);
    assert!(c == 0 || c == 2);
    assert_eq!(j["conditions"]["lc"]["holds_up_to_horizon"], true);

    std::fs::write(&file, "0\n1\nnot-a-number\n").unwrap();
    let o = mflat(&["diagnose", "--family", "custom", "--custom-file", file.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}
