use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const CUBIC_SYSTEM: &str = r#""system": {"f": [0, 1], "g": [0, 1, 0, -1]"#;

fn nsl(args: &[&str], config: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_nsl"))
        .args(args)
        .args(["--config", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(config.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(csv_text: &str) -> Vec<(f64, f64, usize, f64, f64)> {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    assert_eq!(r.headers().unwrap(), vec!["x", "p", "branch", "v", "H"]);
    r.deserialize().map(|row| row.unwrap()).collect()
}

#[test]
fn cheillini_example_reports_both_roots() {
    let o = nsl(&["check-cheillini"], &format!("{{{CUBIC_SYSTEM}}}}}"));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let ells: Vec<f64> = v["solutions"].as_array().unwrap().iter().map(|s| s["ell_value"].as_f64().unwrap()).collect();
    assert_eq!(ells, vec![1.0, -2.0]);
    for s in v["solutions"].as_array().unwrap() {
        assert_eq!(s["partner_sum"].as_f64(), Some(-1.0));
    }
}

#[test]
fn van_der_pol_has_no_solution() {
    let o = nsl(&["check-cheillini"], r#"{"system": {"f": [-1, 0, 1], "g": [0, 1]}}"#);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("no solution"));
}

#[test]
fn malformed_configs_exit_2() {
    for cfg in [r#"{"system": {"f": [0, 1]}}"#, "not json", r#"{"family": {"kind": "quartic_velocity", "kappa": -1}}"#]
    {
        let o = nsl(&["check-cheillini"], cfg);
        assert_eq!(code(&o), 2, "{cfg}");
    }
    let o = nsl(
        &["surface"],
        &format!(r#"{{{CUBIC_SYSTEM}}}, "grid": {{"x_range": [0, 1], "p_range": [0, 1], "nx": 1, "np": 5}}}}"#),
    );
    assert_eq!(code(&o), 2);
    let o = nsl(&["simulate"], r#"{"subcommand": "surface", "family": {"kind": "quartic_velocity", "kappa": 1}}"#);
    assert_eq!(code(&o), 2);
}

#[test]
fn two_branch_surface() {
    let cfg = format!(
        r#"{{{CUBIC_SYSTEM}, "ell": 1}}, "grid": {{"x_range": [-2, 2], "p_range": [0, 4], "nx": 21, "np": 41}}}}"#
    );
    let o = nsl(&["surface"], &cfg);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = rows(&stdout(&o));
    assert_eq!(rows.len(), 21 * 41 * 2);
    assert!(rows.windows(2).all(|w| (w[0].0, w[0].1, w[0].2) < (w[1].0, w[1].1, w[1].2)));
    for pair in rows.chunks(2) {
        assert_eq!((pair[0].2, pair[1].2), (0, 1));
        if pair[0].1 == 0.0 {
            assert!((pair[0].3 - pair[1].3).abs() < 1e-9 && (pair[0].4 - pair[1].4).abs() < 1e-9);
        } else {
            assert!(pair[0].4 != pair[1].4);
        }
    }
}

#[test]
fn single_branch_surface() {
    let cfg = format!(
        r#"{{{CUBIC_SYSTEM}, "ell": -2}}, "grid": {{"x_range": [-2, 2], "p_range": [0, 4], "nx": 11, "np": 11}}}}"#
    );
    let o = nsl(&["surface"], &cfg);
    assert_eq!(code(&o), 0);
    let rows = rows(&stdout(&o));
    assert_eq!(rows.len(), 121);
    assert!(rows.iter().all(|r| r.2 == 0));
}

#[test]
fn quartic_velocity_grid_changes_branch_count_at_two() {
    let cfg = r#"{"family": {"kind": "quartic_velocity", "kappa": 3},
                  "grid": {"x_range": [0, 1], "v_range": [-3, 3], "nx": 2, "nv": 601}}"#;
    let o = nsl(&["surface", "--format", "csv"], cfg);
    assert_eq!(code(&o), 0);
    let rows = rows(&stdout(&o));
    let branches_near = |p0: f64| {
        let mut b: Vec<usize> = rows.iter().filter(|r| r.0 == 0.0 && (r.1 - p0).abs() < 0.05).map(|r| r.2).collect();
        b.sort();
        b.dedup();
        b.len()
    };
    assert_eq!(branches_near(1.8), 3);
    assert_eq!(branches_near(-1.8), 3);
    assert_eq!(branches_near(2.3), 1);
    assert_eq!(branches_near(-2.3), 1);
}

#[test]
fn empty_surface_exits_4() {
    let cfg = r#"{"family": {"kind": "cz_power", "k": 1},
                  "grid": {"x_range": [0, 1], "p_range": [-2, -1], "nx": 3, "np": 3}}"#;
    assert_eq!(code(&nsl(&["surface"], cfg)), 4);
}

fn summary(o: &Output) -> Value {
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    serde_json::from_str(err.lines().last().unwrap()).unwrap()
}

#[test]
fn simulate_hamilton_flow() {
    let cfg = format!(r#"{{{CUBIC_SYSTEM}, "ell": -2}}, "sim": {{"x0": 0.5, "p0": 1, "dt": 1e-3, "T": 10}}}}"#);
    let o = nsl(&["simulate"], &cfg);
    assert_eq!(code(&o), 0);
    let s = summary(&o);
    assert!(s["H_drift"].as_f64().unwrap() < 1e-8);
    assert!(s["ode_residual"].as_f64().unwrap() < 1e-5);
    assert!(s["exit_event"].is_null());
    let text = stdout(&o);
    assert!(text.starts_with("t,x,p\n0.0,0.5,1.0\n"));
    assert_eq!(text.lines().count(), 10_002);
}

#[test]
fn branch_exit_is_an_event() {
    let cfg = format!(
        r#"{{{CUBIC_SYSTEM}, "ell": 1}}, "sim": {{"x0": -1, "p0": 1e-8, "dt": 1e-3, "T": 5, "branch_id": 1}}}}"#
    );
    let o = nsl(&["simulate"], &cfg);
    assert_eq!(code(&o), 0);
    assert_eq!(summary(&o)["exit_event"]["reason"], "BranchBoundary");
}

#[test]
fn damped_family_decays() {
    let cfg = r#"{"family": {"kind": "trial_reciprocal", "alpha": 1, "beta": 1, "mu": [0, 1]},
                  "sim": {"x0": 1, "v0": 0, "dt": 1e-3, "T": 5}}"#;
    let o = nsl(&["simulate", "--format", "json"], cfg);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let xs: Vec<f64> = v["x"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(xs.last().unwrap().abs() < 0.2 && xs.windows(2).all(|w| w[1] <= w[0]));
    assert!(summary(&o)["ode_residual"].as_f64().unwrap() < 1e-4);
}

#[test]
fn simulate_error_codes() {
    let outside = format!(r#"{{{CUBIC_SYSTEM}, "ell": 1}}, "sim": {{"x0": 0, "p0": -1, "dt": 1e-3, "T": 1}}}}"#);
    assert_eq!(code(&nsl(&["simulate"], &outside)), 4);
    let blow_up = r#"{"system": {"f": [0.001], "g": [0, 0, -1]}, "sim": {"x0": 1, "v0": 1, "dt": 1e-2, "T": 10}}"#;
    assert_eq!(code(&nsl(&["simulate"], blow_up)), 5);
}

#[test]
fn build_describes_branches() {
    let o = nsl(&["build"], &format!("{{{CUBIC_SYSTEM}, \"ell\": \"1\"}}}}"));
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["ell"], "1");
    assert_eq!(v["branches"].as_array().unwrap().len(), 2);
    assert_eq!(v["coalescence_at_x0"], serde_json::json!([0.0]));
    let o = nsl(&["build"], r#"{"system": {"f": [-1, 0, 1], "g": [0, 1]}}"#);
    assert_eq!(code(&o), 3);
}

#[test]
fn output_is_deterministic_and_respects_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    std::fs::write(
        &cfg_path,
        format!(
            r#"{{{CUBIC_SYSTEM}, "ell": 1}}, "grid": {{"x_range": [-2, 2], "p_range": [0, 4], "nx": 31, "np": 31}}}}"#
        ),
    )
    .unwrap();
    let run = |threads: &str, out: &Path| {
        let s = Command::new(env!("CARGO_BIN_EXE_nsl"))
            .args(["surface", "--config", cfg_path.to_str().unwrap(), "--out", out.to_str().unwrap()])
            .env("NSL_THREADS", threads)
            .status()
            .unwrap();
        assert!(s.success());
        std::fs::read(out).unwrap()
    };
    let a = run("1", &dir.path().join("a.csv"));
    let b = run("4", &dir.path().join("b.csv"));
    assert_eq!(a, b);
}

#[test]
fn verify_subset_and_fault() {
    let run = |args: &[&str]| Command::new(env!("CARGO_BIN_EXE_nsl")).args(args).output().unwrap();
    let o = run(&["verify", "--only", "legendre", "--seed", "5"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["seed"], 5);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["module"] == "legendre"));

    let o = run(&["verify", "--only", "legendre", "--inject-fault", "lienard-h-sign"]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let id = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "legendre_identity").unwrap();
    assert_eq!(id["passed"], false);
}
