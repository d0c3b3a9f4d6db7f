use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_qifkit"));
    c.env_remove("QIFKIT_SEED");
    c
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "status {:?}, stderr {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Files {
    _dir: TempDir,
    bsc: PathBuf,
    ni: PathBuf,
    u2: PathBuf,
    zero: PathBuf,
}

fn files() -> Files {
    let dir = TempDir::new().unwrap();
    Files {
        bsc: write(&dir, "bsc01.csv", "y0,y1\n0.9,0.1\n0.1,0.9\n"),
        ni: write(&dir, "ni.csv", "1\n1\n"),
        u2: write(&dir, "u2.csv", "0.5,0.5\n"),
        zero: write(&dir, "zero.csv", "1,0\n0.5,0.5\n"),
        _dir: dir,
    }
}

#[test]
fn bayes_capacity_in_nats_and_bits() {
    let f = files();
    let nats = json(&run(&["compute", "bayes-capacity", "--channel", s(&f.bsc)]));
    assert_eq!(nats["schema"], 1);
    assert_eq!(nats["measure"], "bayes-capacity");
    assert_eq!(nats["unit"], "nats");
    let v = nats["value"].as_f64().unwrap();
    assert!((v - 1.8f64.ln()).abs() < 1e-12);

    let bits = json(&run(&["compute", "bayes-capacity", "--channel", s(&f.bsc), "--bits"]));
    assert_eq!(bits["unit"], "bits");
    let b = bits["value"].as_f64().unwrap();
    assert_eq!(b, v / std::f64::consts::LN_2);
    assert!((b - 0.8480).abs() < 5e-5);
}

#[test]
fn arimoto_of_ni_channel_is_zero() {
    let f = files();
    let r = json(&run(&[
        "compute", "arimoto-mi", "--alpha", "1", "--channel", s(&f.ni), "--prior", s(&f.u2),
    ]));
    assert_eq!(r["value"].as_f64().unwrap(), 0.0);
    assert_eq!(r["params"]["alpha"], 1.0);
}

#[test]
fn reports_are_byte_identical() {
    let f = files();
    let args = [
        "compute", "max-alpha-capacity", "--alpha", "2", "--channel", s(&f.bsc), "--seed", "11",
        "--restarts", "4",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let r = json(&a);
    assert_eq!(r["provenance"]["seed"], 11);
    assert_eq!(r["params"]["restarts"], 4);
    assert!(r["diagnostics"]["witness"].is_array());
    assert_eq!(r["provenance"]["inputs"]["channel"].as_str().unwrap().len(), 64);
}

#[test]
fn seed_from_environment() {
    let f = files();
    let out = bin()
        .args(["compute", "max-alpha-capacity", "--alpha", "inf", "--channel", s(&f.bsc)])
        .env("QIFKIT_SEED", "42")
        .output()
        .unwrap();
    let r = json(&out);
    assert_eq!(r["provenance"]["seed"], 42);
    assert!((r["value"].as_f64().unwrap() - 1.8f64.ln()).abs() < 1e-9);
}

#[test]
fn infinite_values_carry_a_reason() {
    let f = files();
    let r = json(&run(&["compute", "ldp", "--channel", s(&f.zero)]));
    assert_eq!(r["value"], "inf");
    assert_eq!(r["reason"], "zero_channel_entry");
    let r = json(&run(&["compute", "ldp", "--channel", s(&f.bsc)]));
    assert!(r.get("reason").is_none());
}

#[test]
fn generalized_measures_with_mean_identifiers() {
    let f = files();
    let r = json(&run(&[
        "compute", "leakage-mult", "--channel", s(&f.bsc), "--prior", s(&f.u2), "--gain", "simplex",
        "--f", "alpha:2",
    ]));
    assert_eq!(r["params"]["f"], "alpha:2");
    assert_eq!(r["params"]["h"], "alpha:2");
    let arimoto = json(&run(&[
        "compute", "arimoto-mi", "--alpha", "2", "--channel", s(&f.bsc), "--prior", s(&f.u2),
    ]));
    let d = r["value"].as_f64().unwrap() - arimoto["value"].as_f64().unwrap();
    assert!(d.abs() < 1e-10);

    let r = json(&run(&["compute", "prior-v", "--prior", s(&f.u2)]));
    assert_eq!(r["unit"], "gain");
    assert_eq!(r["value"], 0.5);
    assert_eq!(r["diagnostics"]["witness"]["action"], 0);

    let r = json(&run(&[
        "compute", "alpha-beta", "--alpha", "2", "--beta", "1", "--channel", s(&f.bsc), "--prior",
        s(&f.u2),
    ]));
    assert!(r["diagnostics"]["warning"].is_string());
}

#[test]
fn gain_matrix_from_file() {
    let f = files();
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "gain.csv", "x0,x1\n1,0\n0,1\n");
    let r = json(&run(&[
        "compute", "leakage-add", "--channel", s(&f.bsc), "--prior", s(&f.u2), "--gain", s(&g),
    ]));
    assert!((r["value"].as_f64().unwrap() - 0.4).abs() < 1e-12);
    assert_eq!(r["params"]["gain"], "matrix:2x2");
    assert!(r["provenance"]["inputs"]["gain"].is_string());
}

#[test]
fn output_file() {
    let f = files();
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("report.json");
    let o = run(&["compute", "bayes-capacity", "--channel", s(&f.bsc), "--out", s(&out)]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(r["measure"], "bayes-capacity");
}

#[test]
fn validation_errors_exit_with_two() {
    let f = files();
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.csv", "0.5,0.6\n0.5,0.5\n");
    let ragged = write(&dir, "ragged.csv", "0.5,0.5\n1\n");
    let cases: Vec<Vec<&str>> = vec![
        vec!["compute", "bayes-capacity", "--channel", s(&bad)],
        vec!["compute", "bayes-capacity", "--channel", s(&ragged)],
        vec!["compute", "bayes-capacity", "--channel", "/nonexistent/c.csv"],
        vec!["compute", "bayes-capacity"],
        vec!["compute", "renyi-entropy", "--prior", s(&f.u2), "--alpha", "-1"],
        vec!["compute", "renyi-entropy", "--prior", s(&f.u2)],
        vec!["compute", "arimoto-mi", "--alpha", "2", "--channel", s(&f.bsc), "--prior", s(&f.ni)],
        vec!["compute", "alpha-beta", "--alpha", "2", "--beta", "0.5", "--channel", s(&f.bsc), "--prior", s(&f.u2)],
        vec!["compute", "no-such-measure"],
        vec!["compute", "mult-f-capacity", "--channel", s(&f.bsc), "--f", "pow:2"],
    ];
    for args in cases {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn verify_axioms_passes() {
    let o = run(&["verify", "axioms", "--seed", "7", "--instances", "1000"]);
    let r = json(&o);
    assert_eq!(r["suite"], "axioms");
    assert_eq!(r["passed"], true);
    assert!(r["results"].as_array().unwrap().len() >= 7);
}

#[test]
fn verify_negative_control_exits_with_three() {
    let o = run(&["verify", "axioms", "--family", "injected", "--instances", "200"]);
    assert_eq!(o.status.code(), Some(3));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["passed"], false);
    let failed = r["results"]
        .as_array()
        .unwrap()
        .iter()
        .find(|x| x["passed"] == false)
        .unwrap();
    assert!(failed["worst_instance"]["channel"].is_array());
}

#[test]
fn verify_duals_and_maximal() {
    let r = json(&run(&["verify", "duals", "--instances", "50"]));
    assert_eq!(r["passed"], true);
    let f = files();
    let r = json(&run(&["verify", "maximal", "--channel", s(&f.bsc), "--grid", "50"]));
    assert_eq!(r["passed"], true);
    assert!((r["params"]["rhs"].as_f64().unwrap() - 1.8f64.ln()).abs() < 1e-9);
}
