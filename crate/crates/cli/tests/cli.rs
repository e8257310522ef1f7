use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn npe(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_npe")).current_dir(dir).args(args).output().expect("spawn npe")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path.display().to_string()
}

#[test]
fn coeffs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    assert!(npe(dir.path(), &["--out", "a", "coeffs"]).status.success());
    assert!(npe(dir.path(), &["--out", "b", "coeffs"]).status.success());
    let a = fs::read_to_string(dir.path().join("a/coeffs_p2.csv")).unwrap();
    assert_eq!(a, fs::read_to_string(dir.path().join("b/coeffs_p2.csv")).unwrap());
    let row = |name: &str, k: usize| -> f64 {
        let line = a.lines().find(|l| l.starts_with(&format!("2,{k},{name},"))).unwrap();
        line.split(',').nth(3).unwrap().parse().unwrap()
    };
    assert!((row("c", 2) - 0.5).abs() < 1e-15);
    assert!((row("B", 4) + std::f64::consts::PI / 4.0).abs() < 1e-15);
}

#[test]
fn verify_signs_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = npe(dir.path(), &["verify", "--suite", "signs"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/verify_signs.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["p"], 2);
    assert!(dir.path().join("out/signs").read_dir().unwrap().count() >= 12);
}

#[test]
fn small_tail_budget_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"a_cap": 4, "p_range": [2, 4]}"#);
    let out = npe(dir.path(), &["--config", &cfg, "verify", "--suite", "ratios"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("INCONCLUSIVE"));
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"p": 1}"#);
    assert_eq!(npe(dir.path(), &["--config", &cfg, "coeffs"]).status.code(), Some(2));
    let cfg = write_config(dir.path(), r#"{"N": 16, "n": 32}"#);
    assert_eq!(npe(dir.path(), &["--config", &cfg, "coeffs"]).status.code(), Some(2));
    let cfg = write_config(dir.path(), r#"{"unknown_key": 1}"#);
    assert_eq!(npe(dir.path(), &["--config", &cfg, "coeffs"]).status.code(), Some(2));
}

#[test]
fn single_mode_decays_linearly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"N": 6, "T": 3.0, "t_grid": {"t_max": 3.0, "points": 10}}"#);
    let out = npe(dir.path(), &["--config", &cfg, "simulate", "--initial", "single-mode:1,1,0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("out/trajectory.csv")).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().contains("status=decaying"));
    lines.next();
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[5].parse().unwrap())
        })
        .collect();
    let y0 = rows[0].1;
    for (t, y) in rows {
        assert!((y - y0 * (-2.0 * t).exp()).abs() <= 1e-12 * y0);
    }
}

#[test]
fn invalid_field_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = r#"{"N": 4, "eps_div": 1e-10, "modes": [{"k": [1, 0, 0], "re": [1.0, 0.0, 0.0], "im": [0.0, 0.0, 0.0]}]}"#;
    fs::write(dir.path().join("bad.json"), bad).unwrap();
    let out = npe(dir.path(), &["simulate", "--initial", "file:bad.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("transversality"));
}

#[test]
fn control_beyond_threshold_blows_up() {
    let dir = tempfile::tempdir().unwrap();
    let out = npe(dir.path(), &["simulate", "--initial", "control", "--threshold-factor", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("out/trajectory.csv")).unwrap();
    assert!(text.lines().next().unwrap().contains("status=blowup_at="));
}

#[test]
fn zero_datum_stabilizes_and_cache_is_reused() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"N": 8, "n": 32, "T": 2.0}"#);
    let args = ["--config", cfg.as_str(), "stabilize", "--y0", "zero", "--cache-dir", "cache"];
    let first = npe(dir.path(), &args);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    let report_a = fs::read_to_string(dir.path().join("out/stabilization.json")).unwrap();
    let second = npe(dir.path(), &args);
    assert!(second.status.success());
    assert!(String::from_utf8_lossy(&second.stderr).contains("cache hit"));
    let a: serde_json::Value = serde_json::from_str(&report_a).unwrap();
    let b: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/stabilization.json")).unwrap()).unwrap();
    assert_eq!(a["report"], b["report"]);
    assert_eq!(a["report"]["lambda"], 1.0);
    assert_eq!(b["cache_hit"], true);
}
