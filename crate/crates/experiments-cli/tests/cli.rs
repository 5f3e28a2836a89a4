use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn nvsim(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_nvsim")).args(args).output().expect("spawn nvsim")
}

fn write_config(dir: &Path, json: &str) -> String {
    let p = dir.join("cfg.json");
    std::fs::write(&p, json).unwrap();
    p.to_str().unwrap().to_string()
}

fn sidecar(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn spinflip_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), r#"{"samples": 11, "n_max": 4}"#);
    let o = nvsim(&["spinflip", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("spinflip_exact.csv")).unwrap();
    assert!(!csv.contains('\r'));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("time_s,mean_fidelity,stderr"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r.len() == 3 && (0.0..=1.0).contains(&r[1]) && r[2] == 0.0));
    assert_eq!(rows[10][0], 5e-3);

    let s = sidecar(&out.join("spinflip_exact.json"));
    assert_eq!(s["seed"], 3);
    assert_eq!(s["config"]["n_max"], 4);
    assert_eq!(s["config"]["experiment"], "spinflip");
    assert_eq!(s["version"], env!("CARGO_PKG_VERSION"));
    assert!(s["wall_clock_s"].as_f64().unwrap() >= 0.0);
    assert_eq!(s["series"]["convergence"]["n_max_check"], 8);
    assert_eq!(s["series"]["convergence"]["passed"], true);
    assert!(out.join("spinflip_effective.csv").exists());
}

#[test]
fn invalid_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    let bad = write_config(dir.path(), r#"{"experiment": "spinflip", "samples": 1}"#);
    assert_eq!(nvsim(&["--config", &bad, "--out", out]).status.code(), Some(2));
    let unknown = write_config(dir.path(), r#"{"experiment": "spinflip", "sample": 5}"#);
    assert_eq!(nvsim(&["--config", &unknown, "--out", out]).status.code(), Some(2));
    assert_eq!(nvsim(&["--out", out]).status.code(), Some(2));
    assert_eq!(nvsim(&["spinflip", "--experiment", "graph", "--out", out]).status.code(), Some(2));
    assert_eq!(nvsim(&["bell-nuclear-noise", "--t2n", "-1", "--out", out]).status.code(), Some(2));
    assert_eq!(nvsim(&["spinflip", "--n-max", "1", "--out", out]).status.code(), Some(2));
    assert_eq!(nvsim(&["spinflip", "--bogus"]).status.code(), Some(2));
    assert!(!Path::new(out).exists());
}

#[test]
fn unconverged_truncation_exits_3_after_writing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), r#"{"experiment": "spinflip", "samples": 5, "n_max": 2, "convergence_tol": 1e-12}"#);
    let o = nvsim(&["--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let s = sidecar(&out.join("spinflip_exact.json"));
    assert_eq!(s["series"]["convergence"]["passed"], false);
}

#[test]
fn ensemble_runs_reproduce_from_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let cfg = write_config(dir.path(), r#"{"experiment": "bell-nuclear-noise", "t2n": [1e-3], "samples": 6, "n_max": 4, "noise_steps": 50}"#);
    let o = nvsim(&["--config", &cfg, "--out", a.to_str().unwrap(), "--realizations", "12", "--pulses", "1", "--seed", "9"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let side = sidecar(&a.join("bell-nuclear-noise_t2n-1ms_pulses-1.json"));
    assert_eq!(side["series"]["realizations"], 12);
    let mut resolved = side["config"].clone();
    resolved["out"] = Value::String(b.to_str().unwrap().into());
    let replay = dir.path().join("replay.json");
    std::fs::write(&replay, serde_json::to_string(&resolved).unwrap()).unwrap();
    assert!(nvsim(&["--config", replay.to_str().unwrap()]).status.success());
    let name = "bell-nuclear-noise_t2n-1ms_pulses-1.csv";
    let first = std::fs::read(a.join(name)).unwrap();
    assert_eq!(first, std::fs::read(b.join(name)).unwrap());
    let text = String::from_utf8(first).unwrap();
    let stderrs: Vec<f64> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(stderrs[0], 0.0);
    assert!(stderrs[5] > 0.0);
}

#[test]
fn transform_check_writes_a_single_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let o = nvsim(&["transform-check", "--n-max", "6", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let s = sidecar(&dir.path().join("transform-check.json"));
    assert!(s["series"].is_null());
    assert!(s["extra"]["report"]["sw_residual"].as_f64().unwrap() < 1e-3);
}
