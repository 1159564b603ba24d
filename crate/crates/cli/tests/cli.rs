//! End-to-end runs of the built binary.

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_staticdom"))
        .args(args)
        .env("STATICDOM_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).expect("valid JSON")
}

/// `(r, H, dH, marker)` rows of a scan.
fn scan_rows(args: &[&str]) -> Vec<(f64, f64, f64, String)> {
    let o = run(args);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,H,dH,marker"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), 4, "{l}");
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap(), f[3].to_string())
        })
        .collect()
}

#[test]
fn verify_suites_pass() {
    for args in [
        &["verify", "--geometry", "sphere", "--dim", "3"][..],
        &["verify", "--geometry", "euclidean", "--dim", "4"],
        &["verify", "--geometry", "hyperbolic", "--dim", "3"],
        &["verify", "--geometry", "schwarzschild", "--dim", "3", "--mass", "2"],
    ] {
        let o = run(args);
        assert_eq!(code(&o), 0, "{args:?}\n{}", stdout(&o));
    }
    let v = json(&run(&["verify", "--geometry", "schwarzschild", "--dim", "3", "--mass", "2", "--format", "json"]));
    let checks = v["checks"].as_array().unwrap();
    let passed = |prefix: &str| {
        let hits: Vec<&Value> = checks.iter().filter(|c| c["name"].as_str().unwrap().starts_with(prefix)).collect();
        !hits.is_empty() && hits.iter().all(|c| c["pass"] == Value::Bool(true))
    };
    assert!(passed("static operator"));
    assert!(passed("H profile pipeline agreement"));
}

#[test]
fn invalid_configurations_exit_two() {
    for args in [
        &["verify", "--geometry", "schwarzschild", "--dim", "2", "--mass", "1"][..],
        &["verify", "--geometry", "schwarzschild", "--dim", "3"],
        &["verify", "--geometry", "sphere", "--mass", "1"],
        &["verify", "--geometry", "torus"],
        &["verify", "--geometry", "sphere", "--dim", "1"],
        &["verify", "--geometry", "sphere", "--dim", "14"],
        &["verify", "--geometry", "sphere", "--tol", "-1"],
        &["classify", "--geometry", "euclidean", "--surface", "cap:angle=1"],
        &["classify", "--geometry", "euclidean", "--surface", "sphere:radius=abc"],
        &["classify", "--geometry", "euclidean", "--surface", "sphere:center=1/2"],
        &["classify", "--geometry", "euclidean", "--surface", "sphere:radius=1,side=up"],
        &["classify", "--geometry", "euclidean"],
        &["classify", "--preset", "moebius"],
        &["classify", "--preset", "ball", "--geometry", "sphere"],
        &["classify", "--geometry", "sphere", "--surface", "cap:angle=pi"],
        &["scan", "--dim", "2", "--mass", "1"],
        &["scan", "--dim", "3", "--mass", "-1"],
        &["scan", "--dim", "3", "--mass", "nan"],
        &["bogus"],
    ] {
        let o = run(args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn intersecting_components_are_invalid() {
    let o = run(&[
        "classify",
        "--geometry",
        "euclidean",
        "--surface",
        "sphere:radius=1",
        "--surface",
        "sphere:center=0.5/0/0,radius=1",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn unit_ball_json() {
    let o = run(&["classify", "--geometry", "euclidean", "--dim", "3", "--surface", "sphere:radius=1", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["config", "diagnostics", "singular_values", "dim", "kernel", "verdict"]);
    assert_eq!(v["dim"], 3);
    assert_eq!(v["verdict"], "NonGeneric");
    let kernel = v["kernel"].as_array().unwrap();
    for (i, element) in kernel.iter().enumerate() {
        let label = format!("x{}", i + 1);
        assert!((element[&label].as_f64().unwrap().abs() - 1.0).abs() < 1e-8);
        assert!(element["1"].as_f64().unwrap().abs() < 1e-8);
    }
}

#[test]
fn triple_cap_has_single_height_potential() {
    let v = json(&run(&["classify", "--preset", "triple-cap", "--dim", "3", "--format", "json"]));
    assert_eq!(v["dim"], 1);
    let element = v["kernel"][0].as_object().unwrap();
    assert!((element["x4"].as_f64().unwrap().abs() - 1.0).abs() < 1e-8);
    for label in ["x1", "x2", "x3"] {
        assert!(element[label].as_f64().unwrap().abs() < 1e-8);
    }
}

#[test]
fn generic_schwarzschild_sphere_exits_one() {
    let o = run(&[
        "classify",
        "--geometry",
        "schwarzschild",
        "--dim",
        "3",
        "--mass",
        "2",
        "--surface",
        "sphere:radius=2",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["verdict"], "Generic");
}

#[test]
fn photon_sphere_is_non_generic() {
    let o = run(&["classify", "--preset", "photon-sphere", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("element,label,coefficient\n0,u_schw,"));
}

#[test]
fn scan_sign_changes_and_horizon() {
    let rows = scan_rows(&["scan", "--dim", "3", "--mass", "2"]);
    let grid: Vec<_> = rows.iter().filter(|r| r.3.is_empty()).collect();
    let mut changes = Vec::new();
    for w in grid.windows(2) {
        if w[0].2.signum() != w[1].2.signum() {
            changes.push((w[0].0, w[1].0));
        }
    }
    assert_eq!(changes.len(), 2, "{changes:?}");
    assert!(changes[0].0 <= 0.26795 && 0.26795 <= changes[0].1);
    assert!(changes[1].0 <= 3.73205 && 3.73205 <= changes[1].1);
    let horizon = rows.iter().find(|r| r.3 == "horizon").unwrap();
    assert_eq!((horizon.0, horizon.1), (1.0, 0.0));
    let r_minus = rows.iter().find(|r| r.3 == "r_minus").unwrap();
    assert!((r_minus.0 - 0.267_949_192_431_122_7).abs() < 1e-12 && r_minus.2.abs() < 1e-12);
}

#[test]
fn scan_markers_are_symmetric_about_the_horizon() {
    let rows = scan_rows(&["scan", "--dim", "4", "--mass", "1"]);
    let at = |m: &str| rows.iter().find(|r| r.3 == m).unwrap().0;
    let product = at("r_minus") * at("r_plus");
    assert!((product * product - 0.25).abs() < 1e-12);
    assert!(at("r_minus") < at("horizon") && at("horizon") < at("r_plus"));
}

#[test]
fn table_has_no_forbidden_cell() {
    let o = run(&["table", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["no_forbidden_cell"], true);
    let entries = v["entries"].as_array().unwrap();
    let find = |name: &str| entries.iter().find(|e| e["name"] == name).unwrap();
    let cap = find("S3 cap pi/2");
    assert_eq!((cap["sign_r"].as_str(), cap["sign_h"].as_str()), (Some("+"), Some("0")));
    assert_eq!(cap["cell_name"], "Neumann");
    assert_eq!(find("S3 cap pi/4")["sign_h"], "+");
    assert_eq!(find("R3 unit ball")["cell_name"], "Steklov");
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["classify", "--preset", "annulus", "--format", "json", "--seed", "7"][..],
        &["classify", "--preset", "triple-cap", "--format", "json"],
        &["scan", "--dim", "5", "--mass", "0.3"],
        &["verify", "--geometry", "hyperbolic", "--format", "json"],
    ] {
        let a = run(args);
        let b = Command::new(env!("CARGO_BIN_EXE_staticdom"))
            .args(args)
            .env("STATICDOM_THREADS", "1")
            .output()
            .unwrap();
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn writes_to_out_path() {
    let path = std::env::temp_dir().join(format!("staticdom-table-{}.csv", std::process::id()));
    let o = run(&["table", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(text.starts_with("name,sign_r,sign_h,cell,cell_name,verdict,dim\n"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn bad_thread_setting_is_invalid() {
    let o = Command::new(env!("CARGO_BIN_EXE_staticdom"))
        .args(["table"])
        .env("STATICDOM_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}
