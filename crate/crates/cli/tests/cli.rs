//! End-to-end runs of the binary: output shapes and exit codes.

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmeasure")).arg("--no-cache").args(args).output().expect("binary runs")
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn keys(v: &Value) -> Vec<&str> {
    let mut k: Vec<&str> = v.as_object().expect("object").keys().map(String::as_str).collect();
    k.sort();
    k
}

fn error_code(o: &Output) -> String {
    let v: Value = serde_json::from_slice(&o.stderr).expect("error json on stderr");
    v["error"]["code"].as_str().expect("code").to_string()
}

#[test]
fn haar_exact_su2() {
    let o = run(&["haar", "--group", "A1", "--expr", "mon(1,0,1,1)", "--mode", "exact"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert_eq!(keys(&v), ["exact", "expr", "mode", "tail_bound", "trunc", "value_im", "value_re", "word"]);
    assert_eq!(v["exact"], "-q/(q^2+1)");
    assert_eq!(v["value_re"], -0.4);
}

#[test]
fn haar_float_a2() {
    let o = run(&[
        "haar", "--group", "A2", "--expr", "mc([1,0];1;3) * mc([0,1];2;1)", "--mode", "float", "--q", "2", "--trunc", "40",
        "--tol", "1e-9",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert!(v["exact"].is_null());
    assert!(v["value_re"].as_f64().unwrap().abs() <= v["tail_bound"].as_f64().unwrap() + 1e-9);
}

#[test]
fn haar_pair_is_nonzero_on_the_dual() {
    // H(c11 c22) for SU(2): q^2 / (q^2 + 1)
    let o = run(&["haar", "--group", "A1", "--expr", "mc([1];1;1) * mc([1];2;2)"]);
    assert_eq!(json_of(&o)["exact"], "q^2/(q^2+1)");
}

#[test]
fn qtr_normalisation() {
    let o = run(&["qtr", "--group", "A2", "--word", "1,2", "--op", "a(2rho)*astar(2rho)"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert_eq!(keys(&v), ["const_w", "exact", "expr", "tail_bound", "value", "value_im", "value_re"]);
    assert_eq!(v["value"], "1");
}

#[test]
fn qtr_at_a_torus_point() {
    let o = run(&["qtr", "--group", "A1", "--word", "1", "--op", "a([2])*astar([2])", "--t", "1/4", "--mode", "float"]);
    assert_eq!(o.status.code(), Some(0));
    assert!((json_of(&o)["value_re"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn cfunc_shapes() {
    let o = run(&["cfunc", "--group", "A1", "--word", "1", "--lambda", "[0,-2]"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert_eq!(keys(&v), ["abs_diff", "group", "lambda", "product", "trace", "value", "word"]);
    assert_eq!(v["value"], 1.0);
    let o = run(&["cfunc", "--group", "A2", "--word", "1,2,1", "--lambda", "0,-2;0,-2", "--mode", "float"]);
    assert_eq!(o.status.code(), Some(0));
    assert!((json_of(&o)["trace"]["value_re"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn cfunc_sweep_csv() {
    let o = run(&["cfunc", "--group", "A1", "--word", "1", "--lambda", "0.2,-1", "--sweep", "-1:2:4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "scale,lambda,trace_re,trace_im,product_re,product_im,abs_diff,status");
    assert_eq!(lines.len(), 5);
    // scale -1 and 0 leave the domain
    assert!(lines[1].ends_with(",domain"));
    assert!(lines[2].ends_with(",domain"));
    assert!(lines[3].ends_with(",ok") && lines[4].ends_with(",ok"));
}

#[test]
fn exit_codes() {
    let o = run(&["haar", "--group", "A2", "--expr", "mc([1,0];1;3) * foo(2)"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_code(&o), "parse");
    let v: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(v["error"]["pos"], 16);

    let o = run(&["cfunc", "--group", "A1", "--word", "1", "--lambda", "[0,2]"]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(error_code(&o), "domain");

    let o = run(&["haar", "--group", "A1", "--expr", "1", "--q", "0.5"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_code(&o), "config");

    let o = run(&["haar", "--group", "A2", "--expr", "mc([1,0];4;1)"]);
    assert_eq!(o.status.code(), Some(3));

    // a tail bound above the tolerance counts as a failure
    let o = run(&["haar", "--group", "A1", "--expr", "mc([1];1;1) * mc([1];2;2)", "--mode", "float", "--trunc", "2", "--tol", "1e-12"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_table() {
    let o = run(&["verify", "--suite", "su2-haar", "--q", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("PASS su2-haar"));
    let o = run(&["verify", "--suite", "normtr", "--suite", "cfunc", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_of(&o).as_array().unwrap().len(), 2);
    assert_eq!(run(&["verify", "--suite", "missing"]).status.code(), Some(3));
}

#[test]
fn info_module() {
    let o = run(&["info", "--group", "B2", "--lambda", "[1,0]"]);
    let v = json_of(&o);
    assert_eq!(v["weyl_order"], 8);
    assert_eq!(v["module"]["dim"], 5);
    assert_eq!(v["datum"]["rho"], serde_json::json!([1, 1]));
}

#[test]
fn module_cache_round_trip() {
    let dir = std::env::temp_dir().join(format!("qmeasure-cli-cache-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    let args = ["haar", "--group", "A2", "--expr", "mc([1,1];1;1) * mc([1,1];8;8)"];
    let cold = Command::new(env!("CARGO_BIN_EXE_qmeasure")).env("QMEASURE_CACHE_DIR", &dir).args(args).output().unwrap();
    assert_eq!(cold.status.code(), Some(0));
    assert!(std::fs::read_dir(&dir).unwrap().count() >= 2);
    let warm = Command::new(env!("CARGO_BIN_EXE_qmeasure")).env("QMEASURE_CACHE_DIR", &dir).args(args).output().unwrap();
    assert_eq!(json_of(&cold), json_of(&warm));
    std::fs::remove_dir_all(&dir).unwrap();
}
