//! End-to-end runs of the `irs-fso` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_irs-fso"))
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("irs-fso-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn delay_defaults_to_stdout_csv() {
    let o = bin().arg("delay").output().unwrap();
    assert!(o.status.success());
    let csv = stdout(&o);
    assert!(csv.starts_with("quantity,value,unit\n"));
    assert!(!csv.contains('\r'));
    // report goes to stderr when no --out is given
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
}

#[test]
fn cir_to_file_with_method_override() {
    let out = scratch("cir.csv", "");
    let o = bin()
        .args(["cir", "--method", "corollary1", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t_seconds,h_gml,method"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2049);
    for r in &rows {
        let cols: Vec<&str> = r.split(',').collect();
        assert_eq!(cols.len(), 3);
        cols[0].parse::<f64>().unwrap();
        assert!(cols[1].parse::<f64>().unwrap() >= 0.0);
    }
}

#[test]
fn taps_from_config() {
    let cfg = scratch("taps.toml", "[geometry]\ntheta_p_deg = 84.2\n");
    let o = bin().arg("taps").arg("--config").arg(&cfg).output().unwrap();
    assert!(o.status.success());
    let csv = stdout(&o);
    assert!(csv.starts_with("m,h_e\n"));
    assert!(csv.lines().count() >= 2);
}

#[test]
fn ber_is_reproducible_per_seed() {
    let cfg = scratch(
        "ber.toml",
        "[geometry]\ntheta_p_rad = 1.3\n[link]\ngamma_t_db = 16.0\n[sim]\nn_bits = 20000\n",
    );
    let run = |seed: &str| {
        let o = bin()
            .args(["ber", "--equalizer", "mmse", "--seed", seed, "--config"])
            .arg(&cfg)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        stdout(&o)
    };
    let a = run("5");
    assert_eq!(a, run("5"));
    assert_ne!(a, run("6"));
    assert_eq!(a.lines().count(), 2);
}

#[test]
fn config_errors_exit_one() {
    let cfg = scratch("bad.toml", "[geometry]\nd_l = -3.0\n");
    let o = bin().arg("delay").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("geometry.d_l"));

    let o = bin().args(["delay", "--config", "/nonexistent/irs.toml"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    let o = bin().arg("frobnicate").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = bin().args(["ber", "--equalizer", "lms"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn theorem1_in_plane_is_rejected() {
    let o = bin().args(["cir", "--method", "theorem1"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}
