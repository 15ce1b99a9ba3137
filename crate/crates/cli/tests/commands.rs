use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn unigate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unigate"))
        .args(args)
        .output()
        .unwrap()
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn without_timestamp(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timestamp");
    v
}

#[test]
fn verify_default_run_passes() {
    let out = unigate(&["verify"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let v = json(&out);
    assert_eq!(v["pass"], Value::Bool(true));
    assert_eq!(v["seed"], 42);
    assert_eq!(v["trials"], 100);
    assert!(v["version"].is_string());
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() >= 8);
    for c in checks {
        assert_eq!(c["parameters"].as_array().unwrap().len(), 100);
        assert!(c["measured"].as_f64().unwrap() <= c["tolerance"].as_f64().unwrap());
    }
}

#[test]
fn verify_single_trial_has_one_draw_per_check() {
    let v = json(&unigate(&["verify", "--trials", "1"]));
    for c in v["checks"].as_array().unwrap() {
        assert_eq!(c["parameters"].as_array().unwrap().len(), 1);
    }
}

#[test]
fn verify_is_deterministic_apart_from_timestamp() {
    let a = unigate(&["verify", "--seed", "9", "--trials", "5"]);
    let b = unigate(&["verify", "--seed", "9", "--trials", "5"]);
    let (a, b) = (without_timestamp(json(&a)), without_timestamp(json(&b)));
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
    let c = without_timestamp(json(&unigate(&["verify", "--seed", "10", "--trials", "5"])));
    assert_ne!(a, c);
}

#[test]
fn verify_rejects_zero_trials() {
    assert_eq!(unigate(&["verify", "--trials", "0"]).status.code(), Some(2));
}

#[test]
fn compose_matrix_of_five_replica_netlist() {
    let out = unigate(&["compose", &fixture("v_from_five_a.unet")]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["kind"], "matrix");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    // lower 2×2 block of V(1, 0.5, 0.25): e^{iα}(cosθ I − i sinθ u·σ)
    let entry = |r: usize, c: usize| -> (f64, f64) {
        let z = &rows[r][c];
        (z[0].as_f64().unwrap(), z[1].as_f64().unwrap())
    };
    let (re, im) = entry(7, 7);
    let (s, c) = 0.25f64.sin_cos();
    assert!((re - c * 0.5f64.cos()).abs() < 1e-12 && (im - c * 0.5f64.sin()).abs() < 1e-12);
    assert_eq!(entry(0, 0), (1.0, 0.0));
    let (re, im) = entry(6, 7);
    // −i sinθ e^{iα} e^{−iφ}
    let arg = 0.5 - 1.0 - std::f64::consts::FRAC_PI_2;
    assert!((re - s * arg.cos()).abs() < 1e-12 && (im - s * arg.sin()).abs() < 1e-12);
}

#[test]
fn compose_deutsch_gate_on_110() {
    let out = unigate(&["compose", &fixture("deutsch.unet"), "--input", "110"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["kind"], "state");
    let amps = v["amplitudes"].as_array().unwrap();
    let (s, c) = 0.9f64.sin_cos();
    let z = |k: usize| (amps[k][0].as_f64().unwrap(), amps[k][1].as_f64().unwrap());
    let (r6, i6) = z(6);
    let (r7, i7) = z(7);
    assert!(r6.abs() < 1e-12 && (i6 - c).abs() < 1e-12, "{:?}", z(6));
    assert!((r7 - s).abs() < 1e-12 && i7.abs() < 1e-12, "{:?}", z(7));
}

#[test]
fn compose_reports_parse_position() {
    let out = unigate(&["compose", &fixture("unknown_gate.unet")]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(":3:1"), "{err}");
    assert!(err.contains("UNKNOWN_GATE"), "{err}");
}

#[test]
fn compose_missing_file_fails_on_stderr() {
    let out = unigate(&["compose", "/definitely/not/here.unet"]);
    assert!(!out.status.success());
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn compose_rejects_wrong_input_width() {
    let out = unigate(&["compose", &fixture("deutsch.unet"), "--input", "10"]);
    assert!(!out.status.success());
}

#[test]
fn approx_target_equal_to_base_is_one_step() {
    let out = unigate(&[
        "approx",
        "--phi",
        "1",
        "--alpha",
        "2.0",
        "--theta",
        "3.0",
        "--target-alpha",
        "2.0",
        "--target-theta",
        "3.0",
        "--eps",
        "0.1",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["n"], 1);
    assert_eq!(v["met"], true);
}

#[test]
fn approx_golden_pair_reaches_origin() {
    let a = format!("{}", std::f64::consts::TAU * 0.6180339887);
    let t = format!("{}", std::f64::consts::TAU * 0.3819660113);
    let out = unigate(&[
        "approx",
        "--phi",
        "0",
        "--alpha",
        &a,
        "--theta",
        &t,
        "--target-alpha",
        "0",
        "--target-theta",
        "0",
        "--eps",
        "0.05",
    ]);
    assert!(out.status.success());
    assert_eq!(json(&out)["n"], 89);
}

#[test]
fn approx_unmet_exits_nonzero_with_best_result() {
    let out = unigate(&[
        "approx",
        "--alpha",
        "0",
        "--theta",
        "0",
        "--target-alpha",
        "1",
        "--target-theta",
        "1",
        "--eps",
        "0.1",
        "--n-max",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["met"], false);
}

#[test]
fn approx_rejects_nonpositive_eps() {
    for eps in ["0", "-0.1", "nan"] {
        let out = unigate(&[
            "approx",
            "--target-alpha",
            "0",
            "--target-theta",
            "0",
            "--eps",
            eps,
        ]);
        assert_eq!(out.status.code(), Some(2), "eps {eps}");
    }
}

fn csv(out: &Output) -> Vec<(usize, f64)> {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,distance"));
    lines
        .map(|l| {
            let (n, d) = l.split_once(',').unwrap();
            (n.parse().unwrap(), d.parse().unwrap())
        })
        .collect()
}

#[test]
fn converge_rz_at_zero_is_zero() {
    let out = unigate(&[
        "converge",
        "--construction",
        "rz",
        "--beta",
        "0",
        "--n",
        "1,4,16",
    ]);
    assert!(out.status.success());
    let rows = csv(&out);
    assert_eq!(rows.iter().map(|r| r.0).collect::<Vec<_>>(), [1, 4, 16]);
    assert!(rows.iter().all(|r| r.1 == 0.0));
}

#[test]
fn converge_vperp_drops_tenfold() {
    let out = unigate(&[
        "converge",
        "--construction",
        "vperp",
        "--beta",
        "0.5",
        "--n",
        "4,16,64,256,1024,4096",
    ]);
    let rows = csv(&out);
    assert!(rows[5].1 <= rows[0].1 / 10.0);
}

#[test]
fn converge_d_is_nonincreasing_after_first_row() {
    let out = unigate(&[
        "converge",
        "--construction",
        "d",
        "--theta",
        "0.9",
        "--n",
        "1,4,16,64,256",
    ]);
    let rows = csv(&out);
    assert!(rows[1..].windows(2).all(|w| w[1].1 <= w[0].1), "{rows:?}");
}

#[test]
fn converge_usage_errors() {
    assert_eq!(
        unigate(&["converge", "--construction", "sk", "--n", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        unigate(&["converge", "--construction", "rz", "--n", "4,2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn compile_d_default_gate() {
    let out = unigate(&["compile-d", "--target-theta", "0.9", "--stage-eps", "0.3"]);
    assert!(out.status.success());
    let v = json(&out);
    let stages = v["per_stage"].as_array().unwrap();
    assert_eq!(stages.len(), 3);
    let sum: u64 = stages
        .iter()
        .map(|s| s["gate_count"].as_u64().unwrap())
        .sum();
    assert_eq!(v["total_a_count"].as_u64().unwrap(), sum);
    assert!(v["max_power_err"].as_f64().unwrap() <= 0.3);
    assert!(v["final_distance"].as_f64().unwrap().is_finite());
}

#[test]
fn compile_d_degenerate_gate_fails() {
    let out = unigate(&[
        "compile-d",
        "--alpha",
        "0",
        "--theta",
        "0",
        "--target-theta",
        "0.9",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unreachable"));
}
