use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn qaccess(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_qaccess"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let _ = child.stdin.take().unwrap().write_all(stdin.as_bytes());
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn classify_identity_ray() {
    let out = qaccess(&["classify"], r#"{"basis": [[1, 1, 1, 0, 0, 0]]}"#);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["case"], "3c");
    assert_eq!((v["n_p"].as_u64(), v["n_cp"].as_u64()), (Some(1), Some(1)));
}

#[test]
fn classify_spin_field_pattern() {
    let basis = r#"{"basis": [[1,0,0,0,0,0],[0,0,1,0,0,0],[0,0,0,1,0,0],[0,0,0,0,1,0],[0,0,0,0,0,1]]}"#;
    let out = qaccess(&["classify"], basis);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["case"], "3b");
    assert_eq!(v["n_p"], 5);
    assert_eq!(v["n_cp"], 3);
    assert_eq!(v["split_condition"], "condition1");
    assert_eq!(v["isotropic_span"]["k_dim"], 1);
}

#[test]
fn classify_rejects_bad_input() {
    let out = qaccess(&["classify"], r#"{"basis": []}"#);
    assert_eq!(out.status.code(), Some(1));
    let out = qaccess(&["classify"], r#"{"basis": [[1, 1, 1, 0, 0]]}"#);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("basis"), "{}", stderr(&out));
    let out = qaccess(&["classify"], r#"{"basis": [[1, 1, 1, 0, 0, 0]], "extra": 1}"#);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn classify_indefinite_ray_is_a_domain_result() {
    let out = qaccess(&["classify"], r#"{"basis": [[1, -1, 0, 0, 0, 0]]}"#);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["case"], "1");
}

#[test]
fn lie_generator_and_compare() {
    let out = qaccess(&["lie"], r#"{"c": [1, 1, 0, 0, 0, 0], "h": [0, 0, 1]}"#);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["dim"], 2);
    assert_eq!(v["accessible"], false);

    let input = r#"{"basis": [[1,0,0,0,0,0],[0,1,0,0,0,0],[0,0,0,0,0,1]], "h": [0, 0, 1], "theta_p": [1, 1, 0.3], "theta_cp": [1, 1, 0]}"#;
    let out = qaccess(&["lie"], input);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!((v["dim_p"].as_u64(), v["dim_cp"].as_u64()), (Some(9), Some(2)));
    assert_eq!(v["differ"], true);
}

#[test]
fn lie_compare_rejects_infeasible_parameters() {
    let input = r#"{"basis": [[1,0,0,0,0,0],[0,1,0,0,0,0],[0,0,0,0,0,1]], "h": [0, 0, 1], "theta_p": [1, 1, 0.3], "theta_cp": [1, 1, 0.3]}"#;
    let out = qaccess(&["lie"], input);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn evolve_empty_schedule_is_one_row() {
    let out = qaccess(&["evolve"], r#"{"c": [1, 0, 0, 0, 0, 0], "h": [0, 0, 1], "v0": [0.5, 0, 0], "dt": 0.1}"#);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows = qaccess::csvio::read_trajectory(&out.stdout[..]).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][..4], [0.0, 0.5, 0.0, 0.0]);
}

#[test]
fn evolve_csv_round_trip_is_exact() {
    let input = r#"{"c": [0.3, 0.1, 0.2, 0, 0, 0], "h": [0.2, 0, 1], "v0": [0.3, 0.1, 0.2], "dt": 0.05,
        "schedule": [{"duration": 0.7, "u": 1}, {"duration": 0.33, "u": 0}]}"#;
    let csv = qaccess(&["evolve"], input);
    assert_eq!(csv.status.code(), Some(0), "{}", stderr(&csv));
    let js = qaccess(&["evolve", "--format", "json"], input);
    let v = json(&js);
    let rows = qaccess::csvio::read_trajectory(&csv.stdout[..]).unwrap();
    let t = v["t"].as_array().unwrap();
    assert_eq!(rows.len(), t.len());
    for (row, (t, s)) in rows.iter().zip(t.iter().zip(v["states"].as_array().unwrap())) {
        assert_eq!(row[0].to_bits(), t.as_f64().unwrap().to_bits());
        for k in 0..3 {
            assert_eq!(row[1 + k].to_bits(), s[k].as_f64().unwrap().to_bits());
        }
    }
    let last = rows.last().unwrap();
    assert!((last[0] - 1.03).abs() < 1e-12);
}

#[test]
fn evolve_rejects_unphysical_start() {
    let out = qaccess(&["evolve"], r#"{"c": [1, 0, 0, 0, 0, 0], "h": [0, 0, 1], "v0": [0.6, 0, 0], "dt": 0.1}"#);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spin_field_zero_family() {
    let out = qaccess(&["spin-field"], r#"{"family": "zero", "w33": 0}"#);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    for key in ["c11", "c12", "c13", "c23", "c33", "omega1", "omega2", "omega3"] {
        assert_eq!(v[key].as_f64(), Some(0.0), "{key}");
    }
    assert_eq!(v["cp_admissible"], true);
}

#[test]
fn spin_field_exponential_needs_tau() {
    let out = qaccess(&["spin-field"], r#"{"family": "exponential", "w11": 1}"#);
    assert_eq!(out.status.code(), Some(1));
    let out = qaccess(&["spin-field"], r#"{"family": "white", "w11": 1, "w13": 2, "w33": 1}"#);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn montecarlo_needs_samples() {
    let input = r#"{"model": {"family": "white", "w11": 0.02, "w33": 0.01}, "b3": 1, "v0": [0.5, 0, 0], "dt": 0.01, "t_final": 1, "n_samples": 0}"#;
    let out = qaccess(&["montecarlo"], input);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn montecarlo_is_deterministic_per_seed() {
    let input = r#"{"model": {"family": "white", "w11": 0.01, "w33": 0.005}, "b3": 1, "v0": [0.5, 0, 0], "dt": 0.01, "t_final": 1, "n_samples": 100}"#;
    let a = qaccess(&["montecarlo", "--seed", "7"], input);
    let b = qaccess(&["montecarlo", "--seed", "7"], input);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["n_samples"], 100);
}

#[test]
fn reproduce_passes_and_perturbation_fails() {
    let a = qaccess(&["reproduce", "--seed", "3"], "");
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(json(&a)["all_pass"], true);
    let b = qaccess(&["reproduce", "--seed", "3"], "");
    assert_eq!(a.stdout, b.stdout);
    let p = qaccess(&["reproduce", "--perturb-convention"], "");
    assert_eq!(p.status.code(), Some(3));
    assert!(stderr(&p).contains("mismatch"));
}

#[test]
fn config_and_tolerance_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"seed": 1, "colour": "blue"}"#).unwrap();
    let out = qaccess(&["reproduce", "--config", path(&cfg)], "");
    assert_eq!(out.status.code(), Some(1));

    let input = dir.path().join("in.json");
    let output = dir.path().join("out.json");
    std::fs::write(&input, r#"{"basis": [[1, 1, 1, 0, 0, 0]]}"#).unwrap();
    std::fs::write(&cfg, format!(r#"{{"command": "classify", "input": {:?}, "output": {:?}, "tolerances": {{"lie": 1e-8}}}}"#, path(&input), path(&output))).unwrap();
    let out = qaccess(&["classify", "--config", path(&cfg)], "");
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!(v["case"], "3c");

    let out = qaccess(&["classify", "--tol", "nonsense=1"], r#"{"basis": [[1, 1, 1, 0, 0, 0]]}"#);
    assert_eq!(out.status.code(), Some(1));
    let out = qaccess(&["classify", "--tol", "lie"], r#"{"basis": [[1, 1, 1, 0, 0, 0]]}"#);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors() {
    assert_eq!(qaccess(&["frobnicate"], "").status.code(), Some(1));
    assert_eq!(qaccess(&["--help"], "").status.code(), Some(0));
    assert_eq!(qaccess(&["spin-field", "--format", "csv"], r#"{"family": "zero"}"#).status.code(), Some(1));
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}
