use std::path::{Path, PathBuf};
use std::process::Command;

use rotframe_cli::emit_plot_data;
use rotframe_core::io::{read_series_csv, Series};
use serde_json::Value;

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn rotframe(args: &[&str], cfg: &Path, out: &Path) -> (i32, Value) {
    let status = Command::new(env!("CARGO_BIN_EXE_rotframe"))
        .args(args)
        .arg("--config")
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap();
    let text = std::fs::read_to_string(out.join("summary.json")).unwrap_or_else(|_| "null".into());
    (status.status.code().unwrap(), serde_json::from_str(&text).unwrap())
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("exp.toml");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn sagnac_unit_square() {
    let dir = tempfile::tempdir().unwrap();
    let (code, s) = rotframe(&["sagnac"], &config("sagnac.toml"), dir.path());
    assert_eq!(code, 0);
    assert_eq!(s["schema_version"], 1);
    assert_eq!(s["status"], "ok");
    assert!((f(&s["result"]["value_rad"]) - 2.0).abs() < 1e-10);
    assert!((f(&s["result"]["value_mod_2pi"]) - 2.0).abs() < 1e-10);
    assert_eq!(s["result"]["method"]["kind"], "line_integral");
    assert_eq!(s["result"]["path_summary"]["vertices"], 4);
}

#[test]
fn sagnac_si_earth() {
    let dir = tempfile::tempdir().unwrap();
    let (code, s) = rotframe(&["sagnac"], &config("sagnac_si.toml"), dir.path());
    assert_eq!(code, 0);
    let expect = 2.0 * 1.674_927_50e-27 * 7.292e-5 / 1.054_571_817e-34;
    assert!((f(&s["result"]["value_rad"]) - expect).abs() < 1e-9 * expect);
}

#[test]
fn spin_phase_full_turn_is_minus_identity() {
    let dir = tempfile::tempdir().unwrap();
    let (code, s) = rotframe(&["spin-phase"], &config("spin_phase.toml"), dir.path());
    assert_eq!(code, 0);
    let re = &s["result"]["operator_re"];
    let im = &s["result"]["operator_im"];
    for i in 0..2 {
        for j in 0..2 {
            let want = if i == j { -1.0 } else { 0.0 };
            assert!((f(&re[i][j]) - want).abs() < 1e-12);
            assert!(f(&im[i][j]).abs() < 1e-12);
        }
    }
    assert!(s["result"]["value_rad"].is_null());
}

#[test]
fn spin_orbit_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let (code, s) = rotframe(&["spin-orbit"], &config("spin_orbit.toml"), dir.path());
    assert_eq!(code, 0);
    assert!(f(&s["result"]["distance_to_closed_form"]) < 1e-12);
    let area = f(&s["result"]["path_summary"]["area_vector"][2]);
    assert!((f(&s["result"]["scalar_phase_rad"]) - 1e-4 * area).abs() < 1e-10 * area * 1e-4);
}

#[test]
fn gauge_check_restricted_is_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let (code, s) = rotframe(&["gauge-check"], &config("gauge_check.toml"), dir.path());
    assert_eq!(code, 0);
    assert_eq!(s["result"]["invariant"], true);
    assert!(f(&s["result"]["phase_delta"]).abs() < 1e-10);
    assert_eq!(s["result"]["probes"], 20);
}

#[test]
fn gauge_check_violation_exits_3_with_summary() {
    let dir = tempfile::tempdir().unwrap();
    let (code, s) = rotframe(&["gauge-check"], &config("gauge_violation.toml"), dir.path());
    assert_eq!(code, 3);
    assert_eq!(s["status"], "error");
    assert_eq!(s["exit_code"], 3);
    assert_eq!(s["result"]["invariant"], false);
    assert!(s["error"].as_str().unwrap().contains("rest-frame"));
}

#[test]
fn propagate_writes_csv_and_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let (code, s) = rotframe(&["propagate"], &config("propagate.toml"), dir.path());
    assert_eq!(code, 0);
    assert!(f(&s["result"]["norm_drift"]) < 1e-10);
    let csv = read_series_csv(std::fs::File::open(dir.path().join("trajectory.csv")).unwrap()).unwrap();
    assert_eq!(csv.columns, ["t", "x", "y", "z", "vx", "vy", "vz"]);
    assert_eq!(csv.len(), 21);
    let snap = rotframe_core::io::load_snapshot(dir.path().join("final_state.rfws")).unwrap();
    assert_eq!(snap.components, 2);
    assert!((snap.time - 10.0).abs() < 1e-12);
}

#[test]
fn ehrenfest_small_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
        units = "natural"
        [setup]
        mass = 1.0
        omega = [0.0, 0.0, 0.5]
        [grid]
        dim = 2
        points = 64
        length = 48.0
        [state]
        center = [4.0, 0.0, 0.0]
        width = 2.0
        [integrator]
        dt = 0.05
        steps = 120
        record_every = 4
        "#,
    );
    let out = dir.path().join("out");
    let (code, s) = rotframe(&["ehrenfest"], &cfg, &out);
    assert_eq!(code, 0);
    assert!(f(&s["result"]["max_relative_deviation"]) < 1e-2);
    assert!(f(&s["result"]["ehrenfest_residual"]) < 1e-3);
    assert!(out.join("quantum.csv").exists() && out.join("classical.csv").exists());
}

#[test]
fn dirac_compare_reports_budget() {
    let dir = tempfile::tempdir().unwrap();
    let (code, s) = rotframe(&["dirac-compare"], &config("dirac_compare.toml"), dir.path());
    assert_eq!(code, 0);
    assert_eq!(s["result"]["within_budget"], true);
    assert!(f(&s["result"]["max_relative_difference"]) < 0.05);
    assert!(f(&s["result"]["pauli_without_efield_vs_spin_rotation_hamiltonian"]) < 1e-12);
    for name in ["dirac_hamiltonian.txt", "pauli_hamiltonian.txt", "metric_fields.csv"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
}

#[test]
fn summaries_are_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    rotframe(&["gauge-check"], &config("gauge_check.toml"), a.path());
    rotframe(&["gauge-check"], &config("gauge_check.toml"), b.path());
    let ra = std::fs::read(a.path().join("summary.json")).unwrap();
    let rb = std::fs::read(b.path().join("summary.json")).unwrap();
    assert_eq!(ra, rb);
}

#[test]
fn config_errors_exit_2_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("units = \"natural\"\n[setup]\nmass = -1.0\nomega = [0.0, 0.0, 1.0]\n[spin]\nt = 1.0\n", "setup.mass"),
        ("[setup]\nmass = 1.0\nomega = [0.0, 0.0, 1.0]\n[spin]\nt = 1.0\n", "units"),
        ("units = \"natural\"\n[setup]\nmass = 1.0\nomega = [0.0, 0.0, 1.0]\n", "spin.t"),
        ("units = \"natural\"\nfoo = 1\n[setup]\nmass = 1.0\nomega = [0.0, 0.0, 1.0]\n[spin]\nt = 1.0\n", "foo"),
        ("units = \"natural\"\n[setup]\nmass = 1.0\nomega = [0.0, 0.0, 1.0]\n[spin]\nt = 1.0\n[method]\nkind = \"ordered_product\"\nsteps = 0\n", "method.steps"),
    ];
    for (text, field) in cases {
        let cfg = write_config(dir.path(), text);
        let (code, s) = rotframe(&["spin-phase"], &cfg, dir.path());
        assert_eq!(code, 2, "{field}");
        assert!(s["error"].as_str().unwrap().contains(field), "{field}: {}", s["error"]);
    }
    let (code, _) = rotframe(&["spin-phase", "--units", "si"], &config("spin_phase.toml"), dir.path());
    assert_eq!(code, 2);
}

#[test]
fn unknown_mode_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_rotframe"))
        .args(["teleport", "--config"])
        .arg(config("sagnac.toml"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn precondition_failure_exits_3() {
    // |Omega x|/c reaches 1 on the grid: the weak-field expansion is invalid.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "units = \"natural\"\n[setup]\nmass = 1.0\nomega = [0.0, 0.0, 1.0]\n[grid]\ndim = 1\npoints = 8\nlength = 10.0\n",
    );
    let (code, s) = rotframe(&["dirac-compare"], &cfg, dir.path());
    assert_eq!(code, 3);
    assert_eq!(s["status"], "error");
}

#[test]
fn stability_abort_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
        units = "natural"
        [setup]
        mass = 1.0
        omega = [0.0, 0.0, 0.5]
        [grid]
        dim = 2
        points = 32
        length = 16.0
        [state]
        width = 1.0
        [integrator]
        dt = 5.0
        steps = 10
        abort_on_warning = true
        "#,
    );
    let (code, s) = rotframe(&["propagate"], &cfg, dir.path());
    assert_eq!(code, 4);
    assert!(!s["result"]["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn plot_data_contract() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    let mut s = Series::new(&["t", "x"]);
    for (t, x) in [(0.0, 0.1), (0.5, 1.0 / 3.0), (1.0, -2.5e-300)] {
        s.push(vec![t, x]).unwrap();
    }
    emit_plot_data(&s, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert_eq!(text.lines().next(), Some("t,x"));
    let back = read_series_csv(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(back, s);

    let empty = Series::new(&["t", "x"]);
    assert!(emit_plot_data(&empty, &dir.path().join("e.csv")).is_err());
    assert!(emit_plot_data(&s, &dir.path().join("missing/dir/x.csv")).is_err());
}
