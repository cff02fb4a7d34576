use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hvforge() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hvforge"));
    c.env_remove("HVFORGE_TOL").env("RUST_LOG", "error");
    c
}

fn run(args: &[&str]) -> Output {
    hvforge().args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = run(&full);
    assert!(out.status.success(), "{:?}: {}", args, String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_decompose_verify_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("oct.json");
    let out = run(&["build", "--preset", "octahedron", "-o", path(&model)]);
    assert_eq!(code(&out), 0);
    assert!(model.exists());

    let d = json(&["decompose", "--model", path(&model), "--state", "+z"]);
    let w: Vec<f64> = serde_json::from_value(d["weights"].clone()).unwrap();
    assert_eq!(w.len(), 8);
    assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!(d["residual"].as_f64().unwrap() < 1e-12);

    let v = json(&["verify", "--model", path(&model), "--eigenstates", "--random", "20", "--seed", "4"]);
    assert_eq!(v["pass"], Value::Bool(true));
    assert_eq!(v["states"].as_u64(), Some(26));
}

#[test]
fn spekkens_subset_via_keep() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("spek.json");
    let keep = "111,100,010,001";
    assert_eq!(code(&run(&["build", "--preset", "octahedron", "--keep", keep, "-o", path(&model)])), 0);
    let d = json(&["decompose", "--model", path(&model), "--state", "-x"]);
    let w: Vec<f64> = serde_json::from_value(d["weights"].clone()).unwrap();
    assert_eq!(w.len(), 4);
    let v = json(&["verify", "--model", path(&model), "--eigenstates", "--random", "0"]);
    assert_eq!(v["pass"], Value::Bool(true));
}

#[test]
fn model_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    assert_eq!(code(&run(&["build", "--preset", "cube", "-o", path(&a)])), 0);
    let first: Value = serde_json::from_str(&std::fs::read_to_string(&a).unwrap()).unwrap();
    let model = hvforge::formats::load_model(&a, hvforge_core::Tolerance::default()).unwrap();
    let b = dir.path().join("b.json");
    hvforge::formats::write_json(&b, &model).unwrap();
    let second: Value = serde_json::from_str(&std::fs::read_to_string(&b).unwrap()).unwrap();
    assert_eq!(first, second);
    assert_eq!(first["N"].as_u64(), Some(4));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&run(&["build", "--preset", "nonesuch"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["orbits", "--preset", "octahedron", "--group", "icosahedral"])), 4);

    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("k.json");
    assert_eq!(code(&run(&["build", "--preset", "octahedron", "--keep", "111,100", "-o", path(&model)])), 0);
    assert_eq!(code(&run(&["decompose", "--model", path(&model), "--state", "+z"])), 5);

    let zero = dir.path().join("zero.json");
    std::fs::write(&zero, r#"{"directions": [[0, 0, 0], [1, 0, 0]]}"#).unwrap();
    assert_eq!(code(&run(&["build", "--spec", path(&zero)])), 2);

    let bad_tol = hvforge().env("HVFORGE_TOL", "-1").args(["build", "--preset", "cube"]).output().unwrap();
    assert_eq!(code(&bad_tol), 2);
}

#[test]
fn single_triad_has_assignment_but_no_witness() {
    let dir = tempfile::tempdir().unwrap();
    let rays = dir.path().join("rays.json");
    std::fs::write(&rays, r#"{"vectors": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}"#).unwrap();
    let k = json(&["ks", "--rays", path(&rays)]);
    assert!(k["noncontextual_assignment"].is_array(), "{k}");
    assert_eq!(code(&run(&["ks", "--rays", path(&rays), "--witness"])), 3);
}

#[test]
fn peres_has_no_assignment() {
    let k = json(&["ks", "--preset", "peres33"]);
    assert!(k["noncontextual_assignment"].is_null(), "{k}");
    assert_eq!(k["triads"].as_u64(), Some(16));
}

#[test]
fn simulate_is_reproducible() {
    let args = ["simulate", "--preset", "octahedron", "--state", "+y", "--trials", "2000", "--seed", "9"];
    let a = json(&args);
    let b = json(&args);
    assert_eq!(a["counts"], b["counts"]);
    let c = json(&["simulate", "--preset", "octahedron", "--state", "+y", "--trials", "2000", "--seed", "10"]);
    assert_ne!(a["counts"], c["counts"]);
}

#[test]
fn trivial_group_gives_singletons() {
    let o = json(&["orbits", "--preset", "octahedron", "--group", "trivial"]);
    let sizes: Vec<u64> = serde_json::from_value(o["orbit_sizes"].clone()).unwrap();
    assert_eq!(sizes, vec![1; 8]);
    assert_eq!(o["minimal_union_size"].as_u64(), Some(8));
}

#[test]
fn small_convergence_run() {
    let c = json(&["converge", "--n", "4,12", "--samples", "3", "--seed", "2"]);
    let rows = c["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(c["all_at_least_one"], Value::Bool(true));
}

#[test]
fn table_output_is_default() {
    let out = run(&["build", "--preset", "cube"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("McMullen"));
    assert!(text.lines().any(|l| l.contains("-+-")));
}
