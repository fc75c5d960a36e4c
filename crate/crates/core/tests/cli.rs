use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hyers_ulam_l1::fourier::SampledFunction;
use jsonschema::JSONSchema;
use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_hu-l1");

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(dir: &Path, args: &[&str]) -> Run {
    let Output { status, stdout, stderr } = Command::new(BIN)
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: status.code().expect("exit code"),
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn schema(name: &str) -> JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(name);
    let value: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    JSONSchema::compile(&value).expect("schema compiles")
}

fn assert_valid(schema_name: &str, json: &str) -> Value {
    let value: Value = serde_json::from_str(json).unwrap_or_else(|e| panic!("{e}: {json}"));
    let compiled = schema(schema_name);
    if let Err(errors) = compiled.validate(&value) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("{schema_name}: {msgs:?}\n{json}");
    }
    value
}

fn fixtures() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "z_plus_1.json", r#"{"coeffs":[[1,0],[1,0]]}"#);
    write(d, "z_plus_2.json", r#"{"coeffs":[[2,0],[1,0]]}"#);
    write(d, "z_minus_i.json", r#"{"coeffs":[[0,-1],[1,0]]}"#);
    write(d, "second_order.json", r#"{"coeffs":[[2,0],[3,0],[1,0]]}"#);
    write(d, "malformed.json", r#"{"coeffs":[[1,0],"#);
    write(d, "f.json", r#"{"terms":[{"c":[1,0],"m":0,"z":[-2,0],"support":"pos"}]}"#);
    write(d, "zero.json", r#"{"terms":[]}"#);
    write(
        d,
        "tight.json",
        r#"{"terms":[
            {"c":[1,0],"m":0,"z":[-1,0],"support":"pos"},
            {"c":[-1,0],"m":0,"z":[-2,0],"support":"pos"},
            {"c":[0.01,0],"m":1,"z":[-1,0],"support":"pos"}]}"#,
    );
    write(
        d,
        "stepped.json",
        r#"{"terms":[
            {"c":[1.01,0],"m":0,"z":[-1,0],"support":"pos"},
            {"c":[-1,0],"m":0,"z":[-2,0],"support":"pos"}]}"#,
    );
    write(d, "rough.json", r#"{"terms":[{"c":[1,0],"m":0,"z":[-1,0],"support":"pos"}]}"#);
    dir
}

#[test]
fn stability_outputs() {
    let dir = fixtures();
    let d = dir.path();
    let r = run(d, &["stability", "z_plus_2.json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = assert_valid("stability.schema.json", &r.stdout);
    assert_eq!(v["M"], 0.5);
    assert_eq!(v["hyperbolic"], true);

    let r = run(d, &["stability", "z_minus_i.json"]);
    assert_eq!(r.code, 2);
    let v = assert_valid("stability.schema.json", &r.stdout);
    assert_eq!(v["hyperbolic"], false);
    assert_eq!(v["witness"][1], 1.0);
    assert!(r.stderr.contains("not hyperbolic"));

    let r = run(d, &["stability", "malformed.json"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("parse error"));
    assert_eq!(run(d, &["stability", "missing.json"]).code, 1);
}

#[test]
fn solve_writes_csv_sidecar_and_terms() {
    let dir = fixtures();
    let d = dir.path();
    let r = run(d, &["solve", "z_plus_1.json", "f.json", "--out", "y.csv", "--grid-T", "20", "--grid-N", "1024"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = assert_valid("solve.schema.json", &r.stdout);
    assert!((v["l1_norm"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(v["defect"].as_f64().unwrap() <= 1e-10);
    let s = SampledFunction::read_csv_file(&d.join("y.csv")).unwrap();
    assert_eq!(s.grid().len(), 1024);
    assert_eq!(s.grid().half_width(), 20.0);
    for (k, v) in s.values().iter().enumerate() {
        let t = s.grid().point(k);
        let want = if t > 0.0 { (-t).exp() - (-2.0 * t).exp() } else { 0.0 };
        assert!((v.re - want).abs() < 1e-15 && v.im == 0.0);
    }
    let terms: Value = serde_json::from_str(&std::fs::read_to_string(d.join("y.terms.json")).unwrap()).unwrap();
    assert_eq!(terms["terms"].as_array().unwrap().len(), 2);

    let r = run(d, &["solve", "z_plus_1.json", "zero.json", "--out", "zero.csv", "--grid-N", "64"]);
    assert_eq!(r.code, 0);
    let s = SampledFunction::read_csv_file(&d.join("zero.csv")).unwrap();
    assert_eq!(s.sup_norm(), 0.0);

    assert_eq!(run(d, &["solve", "z_minus_i.json", "f.json"]).code, 2);
}

#[test]
fn solve_then_verify_round_trip() {
    let dir = fixtures();
    let d = dir.path();
    let r = run(d, &["solve", "second_order.json", "f.json", "--out", "y.csv"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let r = run(d, &["verify", "second_order.json", "f.json", "y.csv"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = assert_valid("verify.schema.json", &r.stdout);
    assert_eq!(v["path"], "sampled");
    assert!(v["distance"].as_f64().unwrap() <= 1e-6);
    assert_eq!(v["satisfied"], true);

    // the term JSON next to the CSV verifies in closed form
    let r = run(d, &["verify", "second_order.json", "f.json", "y.terms.json"]);
    assert_eq!(r.code, 0);
    let v = assert_valid("verify.schema.json", &r.stdout);
    assert_eq!(v["path"], "closed");
    assert_eq!(v["distance"], 0.0);
}

#[test]
fn verify_exit_codes() {
    let dir = fixtures();
    let d = dir.path();
    let r = run(d, &["verify", "z_plus_1.json", "f.json", "tight.json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = assert_valid("verify.schema.json", &r.stdout);
    assert!((v["distance"].as_f64().unwrap() - v["bound"].as_f64().unwrap()).abs() < 1e-15);

    // a jump in y makes y' carry a delta that eps does not see
    let r = run(d, &["verify", "z_plus_1.json", "f.json", "stepped.json"]);
    assert_eq!(r.code, 3);
    let v = assert_valid("verify.schema.json", &r.stdout);
    assert_eq!(v["singular_part_excluded"], true);
    assert!(r.stderr.contains("bound violated"));

    let r = run(d, &["verify", "second_order.json", "f.json", "rough.json"]);
    assert_eq!(r.code, 4);
    assert!(r.stderr.contains("too rough"));

    assert_eq!(run(d, &["verify", "z_minus_i.json", "f.json", "rough.json"]).code, 2);
    assert_eq!(run(d, &["verify", "z_plus_1.json", "f.json", "malformed.json"]).code, 1);
}

#[test]
fn probe_reports() {
    let dir = fixtures();
    let d = dir.path();
    let r = run(d, &["probe", "--example", "paper", "--eps", "0.1"]);
    assert_eq!(r.code, 0);
    let v = assert_valid("probe.schema.json", &r.stdout);
    assert!(v["reports"][0]["distance_to_solution_set"].as_f64().unwrap() >= 0.9293);

    let r = run(d, &["probe", "--example", "slow", "--eps", "0.1", "--T", "20"]);
    let v = assert_valid("probe.schema.json", &r.stdout);
    assert!((v["reports"][0]["ratio"].as_f64().unwrap() - 10.0).abs() < 1e-6);

    let r = run(d, &["probe", "--example", "slow", "--T", "2"]);
    let v = assert_valid("probe.schema.json", &r.stdout);
    assert!((v["reports"][0]["ratio"].as_f64().unwrap() - 1.0).abs() < 1e-6);

    let r = run(d, &["probe", "--example", "slow", "--out", "ladder.csv"]);
    let v = assert_valid("probe.schema.json", &r.stdout);
    assert_eq!(v["reports"].as_array().unwrap().len(), 5);
    let csv = std::fs::read_to_string(d.join("ladder.csv")).unwrap();
    assert!(csv.starts_with("parameter,residual,distance,ratio\n"));
    assert_eq!(csv.lines().count(), 6);

    assert_eq!(run(d, &["probe", "--example", "paper", "--T", "4"]).code, 1);
    assert_eq!(run(d, &["probe", "--example", "slow", "--eps", "-1"]).code, 1);
    assert_eq!(run(d, &["probe", "--example", "other"]).code, 1);
    assert_eq!(run(d, &["probe", "--example", "slow", "--T", "0.5"]).code, 1);
    assert_eq!(run(d, &["frobnicate"]).code, 1);
    assert_eq!(run(d, &["--help"]).code, 0);
}

#[test]
fn config_file_and_ranges() {
    let dir = fixtures();
    let d = dir.path();
    let cfg = r#"{"grid":{"T":10,"N":256},"tolerances":{"axis_tol":1e-10,"verify_slack":1e-7},"out":"cfg.csv"}"#;
    let value: Value = serde_json::from_str(cfg).unwrap();
    assert!(schema("config.schema.json").is_valid(&value));
    write(d, "config.json", cfg);
    let r = run(d, &["--config", "config.json", "solve", "z_plus_1.json", "f.json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let s = SampledFunction::read_csv_file(&d.join("cfg.csv")).unwrap();
    assert_eq!((s.grid().half_width(), s.grid().len()), (10.0, 256));

    write(d, "bad_n.json", r#"{"grid":{"T":10,"N":100}}"#);
    assert_eq!(run(d, &["--config", "bad_n.json", "stability", "z_plus_1.json"]).code, 1);
    write(d, "bad_tol.json", r#"{"tolerances":{"axis_tol":0.1}}"#);
    assert_eq!(run(d, &["--config", "bad_tol.json", "stability", "z_plus_1.json"]).code, 1);
    write(d, "unknown.json", r#"{"gird":{}}"#);
    assert_eq!(run(d, &["--config", "unknown.json", "stability", "z_plus_1.json"]).code, 1);
    assert_eq!(run(d, &["stability", "z_plus_1.json", "--axis-tol", "1"]).code, 1);
    assert_eq!(run(d, &["stability", "z_plus_1.json", "--grid-N", "12"]).code, 1);
}
