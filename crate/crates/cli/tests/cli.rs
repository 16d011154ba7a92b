use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_onebit-mmse"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn complex(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

fn read_csv(path: &Path) -> (String, Vec<String>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines().map(str::to_owned);
    let header = lines.next().unwrap();
    (header, lines.collect())
}

#[test]
fn uncorrelated_estimate_is_scaled_sign() {
    let v = json(&run(&["estimate", "--simo", "-n", "2", "--gamma-db", "10", "--phi", "0", "--xi", "0", "--r", "+1+1j,-1-1j"]));
    let scale = (10.0f64 / (11.0 * std::f64::consts::PI)).sqrt();
    assert_eq!(v["method"], "prop1");
    let h = v["h_hat"].as_array().unwrap();
    let (a, b) = (complex(&h[0]), complex(&h[1]));
    assert!((a.0 - scale).abs() < 1e-12 && (a.1 - scale).abs() < 1e-12);
    assert!((b.0 + scale).abs() < 1e-12 && (b.1 + scale).abs() < 1e-12);
    assert!((v["outcome_prob"].as_f64().unwrap() - 0.0625).abs() < 1e-15);
}

#[test]
fn polar_and_cartesian_correlations_agree() {
    let polar = json(&run(&[
        "estimate", "--simo", "-n", "2", "--gamma-db", "5",
        "--phi-mag", "0.9", "--phi-arg", "-0.5235987755982988",
        "--xi-mag", "0.8", "--xi-arg", "-1.0471975511965976",
        "--r", "+1+1j,+1-1j",
    ]));
    let phi = format!("{}{}j", 0.9 * (-std::f64::consts::FRAC_PI_6).cos(), 0.9 * (-std::f64::consts::FRAC_PI_6).sin());
    let xi = format!("{}{}j", 0.8 * (-std::f64::consts::FRAC_PI_3).cos(), 0.8 * (-std::f64::consts::FRAC_PI_3).sin());
    let cart = json(&run(&["estimate", "--simo", "-n", "2", "--gamma-db", "5", "--phi", &phi, "--xi", &xi, "--r", "+1+1j,+1-1j"]));
    let (a, b) = (polar["h_hat"].as_array().unwrap(), cart["h_hat"].as_array().unwrap());
    for k in 0..2 {
        let (x, y) = (complex(&a[k]), complex(&b[k]));
        assert!((x.0 - y.0).abs() < 1e-12 && (x.1 - y.1).abs() < 1e-12);
    }
}

#[test]
fn general_method_can_be_forced() {
    let v = json(&run(&[
        "estimate", "--simo", "-n", "3", "--kind", "real", "--phi", "0.4", "--xi", "0.2",
        "--r", "+1+1j,-1+1j,+1-1j", "--method", "general",
    ]));
    assert_eq!(v["method"], "general");
    let auto = json(&run(&["estimate", "--simo", "-n", "3", "--kind", "real", "--phi", "0.4", "--xi", "0.2", "--r", "+1+1j,-1+1j,+1-1j"]));
    assert_eq!(auto["method"], "prop2");
    let (a, b) = (v["h_hat"].as_array().unwrap(), auto["h_hat"].as_array().unwrap());
    for k in 0..3 {
        let (x, y) = (complex(&a[k]), complex(&b[k]));
        assert!((x.0 - y.0).abs() < 1e-5 && (x.1 - y.1).abs() < 1e-5);
    }
}

#[test]
fn invalid_input_exits_with_two() {
    let out = run(&["estimate", "--simo", "-n", "2", "--phi", "1.2", "--xi", "0", "--r", "+1+1j,-1-1j"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let out = run(&["estimate", "--simo", "-n", "2", "--phi", "0", "--xi", "0", "--r", "+1+1j"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["orthant", "--cov", "1,2;2,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_with_four() {
    let out = run(&["figure", "fig1a", "--grid", "3", "--out", "/nonexistent/dir/out.csv"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn orthant_of_correlated_pair() {
    let v = json(&run(&["orthant", "--cov", "1,0.5;0.5,1"]));
    assert!((v["value"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-14);
    let v = json(&run(&["orthant", "--cov", "1,0,0;0,1,0;0,0,1", "--precision"]));
    assert!((v["value"].as_f64().unwrap() - 0.125).abs() < 1e-15);
}

#[test]
fn validate_reports_and_exits_zero() {
    let out = run(&["validate", "orthant"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().any(|l| l.starts_with("PASS")));
    assert!(!text.contains("FAIL"));
}

#[test]
fn figure_tables_have_expected_shape() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("fig1a", 164, "phi_mag,phi_arg,xi_mag,xi_arg,gamma_db,gamma,mmse,std_error,method"),
        ("fig1b", 4096, "phi_arg,xi_arg,gamma_db,mmse,std_error,method"),
        ("fig2", 246, "phi,xi,gamma_db,gamma,mmse,std_error,method"),
        ("fig3", 1600, "phi,xi,gamma_tilde,gamma_tilde_db,mmse,std_error,method"),
    ];
    for (name, rows, header) in cases {
        let out_path = dir.path().join(format!("{name}.csv"));
        let out = run(&["figure", name, "--out", out_path.to_str().unwrap()]);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let (head, body) = read_csv(&out_path);
        assert_eq!(head, header, "{name}");
        assert_eq!(body.len(), rows, "{name}");
        assert!(out_path.with_extension("json").exists());
        let not_applicable = body.iter().filter(|l| l.ends_with("not_applicable")).count();
        if name == "fig3" {
            assert!(not_applicable > 0 && not_applicable < rows);
        } else {
            assert_eq!(not_applicable, 0, "{name}");
        }
    }
}

#[test]
fn sidecar_regenerates_identical_table() {
    let dir = tempfile::tempdir().unwrap();
    for (name, extra) in [("fig1a", vec!["--grid", "5"]), ("fig2", vec!["--grid", "4", "--evaluation", "mc", "--samples", "2000"])] {
        let first = dir.path().join(format!("{name}.csv"));
        let mut args = vec!["figure", name, "--out", first.to_str().unwrap()];
        args.extend(extra);
        assert!(run(&args).status.success());
        let second = dir.path().join(format!("{name}_again.csv"));
        let sidecar = first.with_extension("json");
        let out = run(&["figure", "--from-metadata", sidecar.to_str().unwrap(), "--out", second.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap(), "{name}");
    }
}

#[test]
fn thread_cap_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let mut tables = Vec::new();
    for threads in ["1", "3"] {
        let path = dir.path().join(format!("t{threads}.csv"));
        let out = bin()
            .args(["figure", "fig2", "--grid", "3", "--evaluation", "mc", "--samples", "5000", "--out", path.to_str().unwrap()])
            .env("ONEBIT_MMSE_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        tables.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(tables[0], tables[1]);
}
