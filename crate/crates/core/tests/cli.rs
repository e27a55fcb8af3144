use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const BASE: &str = "\
kappa = 0.01
gamma_m = 2e-3
g = 4e-6
lambda_hop = 20
drive_E = 2e7
opa_gain = 1.3
opa_phase = 1.5707963267948966
delta_eff = 3
n_a = 0
n_m = 0
";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mirror-entanglement"))
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

#[test]
fn point_reports_baseline() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "base.cfg", BASE);
    let out = run(&["point", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let stdout = text(&out.stdout);
    assert!(stdout.contains("stable=true"), "{stdout}");
    let e_n: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("e_n="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(e_n > 0.0);
}

#[test]
fn missing_key_exits_with_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "bad.cfg", &BASE.replace("kappa = 0.01\n", ""));
    let out = run(&["point", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("kappa"), "{}", text(&out.stderr));
}

#[test]
fn both_detunings_exit_with_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "bad.cfg", &format!("{BASE}delta0 = 5\n"));
    let out = run(&["point", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = text(&out.stderr);
    assert!(err.contains("delta0") || err.contains("delta_eff"), "{err}");
}

#[test]
fn flags_override_the_file() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "base.cfg", BASE);
    let out = run(&[
        "point",
        "--config",
        &cfg,
        "--opa_gain",
        "0",
        "--lambda_hop",
        "18",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(text(&out.stdout).contains("stable=false"));
    let out = run(&["point", "--config", &cfg, "--delta_eff=-3"]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
}

#[test]
fn two_cell_sweep_writes_header_and_rows() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "s.cfg",
        &format!("{BASE}axis1 = opa_gain 1.0 1.3 2\n"),
    );
    let csv = dir.path().join("out.csv");
    let out = run(&["sweep", "--config", &cfg, "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let body = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "axis1,stable,margin,eta_minus,e_n,a_s_abs");
}

#[test]
fn unstable_sweep_leaves_entanglement_empty() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "u.cfg",
        &format!(
            "{}axis1 = delta_eff -6 0 7\n",
            BASE.replace("opa_gain = 1.3", "opa_gain = 0")
        ),
    );
    let out = run(&["sweep", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let body = text(&out.stdout);
    for row in body.lines().skip(1) {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f[1], "false", "{row}");
        assert_eq!(f[3], "");
        assert_eq!(f[4], "");
    }
}

#[test]
fn svg_is_written_next_to_csv() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "s.cfg",
        &format!("{BASE}axis1 = opa_phase 0 3.14159 5\naxis2 = opa_gain 0 2 4\n"),
    );
    let csv = dir.path().join("grid.csv");
    let svg = dir.path().join("grid.svg");
    let out = run(&[
        "sweep",
        "--config",
        &cfg,
        "--out",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 21);
    let doc = std::fs::read_to_string(&svg).unwrap();
    assert!(doc.starts_with("<svg") || doc.starts_with("<?xml"));
    assert!(doc.trim_end().ends_with("</svg>"));
}

#[test]
fn sweep_without_axes_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "base.cfg", BASE);
    assert_eq!(run(&["sweep", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn unwritable_output_is_reported() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "s.cfg",
        &format!("{BASE}axis1 = opa_gain 1.0 1.3 2\n"),
    );
    let target = dir.path().join("missing").join("out.csv");
    let out = run(&["sweep", "--config", &cfg, "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!Path::new(&target).exists());
}

#[test]
fn validate_passes_at_baseline() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "base.cfg", BASE);
    let out = run(&["validate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stdout));
    let stdout = text(&out.stdout);
    for name in [
        "jacobian_vs_drift",
        "lyapunov_residual",
        "mean_field_stability",
        "symplectic_physicality",
    ] {
        assert!(stdout.contains(&format!("{name}: pass")), "{stdout}");
    }
}

#[test]
fn validate_handles_an_undriven_cavity() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "e0.cfg",
        &BASE.replace("drive_E = 2e7", "drive_E = 0"),
    );
    let out = run(&["validate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stdout));
}

#[test]
fn validate_confirms_instability() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "u.cfg",
        &BASE.replace("opa_gain = 1.3", "opa_gain = 0"),
    );
    let out = run(&["validate", "--config", &cfg]);
    let stdout = text(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(stdout.contains("lyapunov_residual: skipped"), "{stdout}");
    assert!(stdout.contains("mean_field_stability: pass"), "{stdout}");
    assert!(stdout.contains("stable=false"));
}

#[test]
fn unknown_convention_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "base.cfg", BASE);
    assert_eq!(
        run(&["point", "--config", &cfg, "--convention", "log10"])
            .status
            .code(),
        Some(2)
    );
}
