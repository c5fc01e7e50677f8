//! End-to-end tests of the `harmonic` binary: determinism, validation and
//! the wire formats of the emitted files.

use std::path::Path;
use std::process::Command;

fn harmonic() -> Command {
    Command::new(env!("CARGO_BIN_EXE_harmonic"))
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

const SMALL_SIM: &str = r#"{
  "model": {"s": 0.5, "n_sites": 3, "rho_left": 0.0, "rho_right": 1.0},
  "simulate": {"events": 100000, "replicas": 2, "seed": 42}
}"#;

#[test]
fn simulate_is_byte_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL_SIM);
    for out in ["a", "b"] {
        let status = harmonic()
            .args(["simulate", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(tmp.path().join(out))
            .status()
            .unwrap();
        assert!(status.success());
    }
    for file in ["stats.csv", "summary.json", "resolved_config.json"] {
        let a = read(&tmp.path().join("a").join(file));
        let b = read(&tmp.path().join("b").join(file));
        assert_eq!(a, b, "{file} must be byte-identical across runs");
    }
}

#[test]
fn seed_flag_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL_SIM);
    for (out, seed) in [("a", "42"), ("b", "43")] {
        let status = harmonic()
            .args(["simulate", "--config"])
            .arg(&cfg)
            .args(["--seed", seed, "--out"])
            .arg(tmp.path().join(out))
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = read(&tmp.path().join("a").join("stats.csv"));
    let b = read(&tmp.path().join("b").join("stats.csv"));
    assert_ne!(a, b, "different seeds must change the statistics");
}

#[test]
fn reflected_densities_need_allow_reflect() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"model": {"s": 0.5, "n_sites": 2, "rho_left": 0.9, "rho_right": 0.2},
            "simulate": {"events": 1000, "replicas": 1, "seed": 1}}"#,
    );
    let status = harmonic()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("fail"))
        .status()
        .unwrap();
    assert!(!status.success(), "rho_left > rho_right must be rejected");

    let status = harmonic()
        .args(["simulate", "--allow-reflect", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("ok"))
        .status()
        .unwrap();
    assert!(status.success());
    let resolved = read(&tmp.path().join("ok").join("resolved_config.json"));
    assert!(resolved.contains("\"rho_left\": 0.9"), "config echoes the input");
}

#[test]
fn unknown_config_keys_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), r#"{"model": {"s": 0.5, "n_sites": 2, "rho_left": 0.1, "rho_right": 0.2, "bogus": 1}}"#);
    let out = harmonic()
        .args(["ness", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("x"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("schema"), "stderr should mention the schema: {err}");
}

#[test]
fn ness_outputs_have_normalized_first_moment_row() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"model": {"s": 0.5, "n_sites": 2, "rho_left": 0.2, "rho_right": 0.5},
            "ness": {"xi_cap": 40, "moment_order": 3, "marginal_cap": 15, "quad_nodes": 24,
                      "states": [[0,0],[1,0]]}}"#,
    );
    let status = harmonic()
        .args(["ness", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("n"))
        .status()
        .unwrap();
    assert!(status.success());
    let moments = read(&tmp.path().join("n").join("moments.csv"));
    let mut lines = moments.lines();
    let header = lines.next().unwrap();
    assert_eq!(header.split(',').count(), 4); // xi_1, xi_2, g, config_hash
    // G(0) = 1 row present
    let zero_row = lines.next().unwrap();
    assert!(zero_row.starts_with("0,0,1.0000000000000000e0"));
    // first moments are affine: G(1,0) = 0.3, G(0,1) = 0.4
    for (xi, want) in [("1,0", 0.3f64), ("0,1", 0.4)] {
        let row = moments
            .lines()
            .find(|l| l.starts_with(&format!("{xi},")))
            .unwrap();
        let g: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert!((g - want).abs() < 1e-12, "{row}");
    }

    // states table: mixture and reconstruction agree here
    let states = read(&tmp.path().join("n").join("states.csv"));
    for line in states.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let mix: f64 = cols[2].parse().unwrap();
        let rec: f64 = cols[3].parse().unwrap();
        assert!((mix - rec).abs() < 1e-8, "{line}");
    }
}

#[test]
fn json_format_switches_table_encoding() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL_SIM);
    let status = harmonic()
        .args(["simulate", "--format", "json", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("j"))
        .status()
        .unwrap();
    assert!(status.success());
    assert!(!tmp.path().join("j").join("stats.csv").exists());
    let stats: serde_json::Value =
        serde_json::from_str(&read(&tmp.path().join("j").join("stats.json"))).unwrap();
    assert_eq!(stats["columns"][0], "site");
    assert!(stats["config_hash"].as_str().unwrap().len() == 64);
}

#[test]
fn verify_single_check_passes_and_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let out = harmonic()
        .args(["verify", "--check", "rate-identity", "--out"])
        .arg(tmp.path().join("v"))
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("PASS rate-identity"));
    let report: serde_json::Value =
        serde_json::from_str(&read(&tmp.path().join("v").join("verify.json"))).unwrap();
    assert_eq!(report["all_passed"], true);
    assert_eq!(report["checks"][0]["name"], "rate-identity");
}

#[test]
fn verify_unknown_check_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let out = harmonic()
        .args(["verify", "--check", "no-such-check", "--out"])
        .arg(tmp.path().join("v"))
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn simulate_rejects_ambiguous_budget() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"model": {"s": 0.5, "n_sites": 2, "rho_left": 0.1, "rho_right": 0.2},
            "simulate": {"events": 100, "time": 5.0, "replicas": 1, "seed": 1}}"#,
    );
    let out = harmonic()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("x"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not both"));
}
