use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gleason-csm")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn gleason_fit_on_born_fixture() {
    let out = run(&["gleason-fit", "--input", &fixture("born_rho.json"), "--dim", "3", "--samples", "200", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["schema"], "v1");
    assert_eq!(v["verdict"], "REGULAR");
}

#[test]
fn gleason_fit_rejects_the_qubit_model() {
    let out = run(&["gleason-fit", "--input", &fixture("classical_qubit.json"), "--seed", "7"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], "NOT_REGULAR");
    let frame = run(&["frame-check", "--input", &fixture("classical_qubit.json"), "--seed", "7"]);
    assert_eq!(frame.status.code(), Some(0));
}

#[test]
fn magic_check_verdicts() {
    let out = run(&["magic-check", "--input", &fixture("identity_q60.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "IDENTITY");
    for name in ["square_q60.json", "sqrt_q60.json", "g0_offset_q60.json", "sine_q60.json"] {
        let out = run(&["magic-check", "--input", &fixture(name)]);
        assert_eq!(out.status.code(), Some(1), "{name}");
    }
}

#[test]
fn theorem2_experiment() {
    let out = run(&["csm-sim", "--experiment", "theorem2-fig1", "--dim", "3", "--trials", "100000", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["empirical"].as_array().unwrap().len(), 4);
}

#[test]
fn output_is_byte_identical() {
    for args in [
        &["csm-sim", "--experiment", "theorem1", "--dim", "3", "--trials", "20000", "--seed", "9"][..],
        &["measure-demo", "--input", &fixture("plan_zxz.json"), "--runs", "500", "--seed", "9"][..],
        &["gleason-fit", "--input", &fixture("born_rho.json"), "--seed", "9"][..],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let args = ["csm-sim", "--experiment", "roundtrip", "--dim", "2", "--trials", "50000", "--seed", "4"];
    let one = Command::new(env!("CARGO_BIN_EXE_gleason-csm")).args(args).env("GLEASON_CSM_THREADS", "1").output().unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_gleason-csm")).args(args).env("GLEASON_CSM_THREADS", "4").output().unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn piron_demo_csv() {
    let out = run(&["piron-demo", "--u", "0.6,0,0.8", "--v", "0,0.6,0.2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("step,x,y,z,h,f"));
    let f: Vec<f64> = lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert!(f.len() >= 2);
    assert!(f.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn measure_demo_writes_csv() {
    let csv = std::env::temp_dir().join(format!("gleason-csm-measure-{}.csv", std::process::id()));
    let out = run(&["measure-demo", "--input", &fixture("plan_zxz.json"), "--runs", "200", "--seed", "3", "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["record"]["entries"].as_array().unwrap().len(), 2);
    let table = std::fs::read_to_string(&csv).unwrap();
    std::fs::remove_file(&csv).unwrap();
    assert!(table.starts_with("step,context,outcome,count,frequency,exact\n"));
    assert_eq!(table.lines().count(), 5);
}

#[test]
fn unitary_path_reaches_odd_permutation() {
    let out = run(&["unitary-path", "--perm", "1,0,2", "--steps", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["endpoint_det"][0].as_f64().unwrap() + 1.0).abs() < 1e-10);
    assert!(v["max_imaginary"].as_f64().unwrap() > 1e-3);
    assert_eq!(v["path"].as_array().unwrap().len(), 11);
}

#[test]
fn usage_and_io_errors_exit_2() {
    assert_eq!(run(&["csm-sim", "--experiment", "theorem1"]).status.code(), Some(2));
    assert_eq!(run(&["csm-sim", "--experiment", "theorem1", "--seed", "1", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(run(&["magic-check", "--input", "/nonexistent/file.json"]).status.code(), Some(2));
    assert_eq!(run(&["unitary-path", "--perm", "0,0"]).status.code(), Some(2));
    assert_eq!(run(&["gleason-fit", "--input", &fixture("born_rho.json"), "--dim", "4", "--seed", "1"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}
