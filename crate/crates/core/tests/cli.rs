mod common;

use std::path::PathBuf;
use std::process::Command;

use proptest::prelude::*;

use common::*;
use weylstar::syntax::render::{
    classical_from_json, classical_to_json, operator_from_json, operator_to_json, render_classical, render_operator,
    PolynomialJson,
};
use weylstar::{parse_classical, parse_operator};

fn weylstar(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_weylstar")).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("weylstar-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn text_round_trip(seed in any::<u64>(), dof in 1usize..=3) {
        let mut rng = rng(seed);
        let shape = Shape::new(dof, 5, 4).hbar(-2, 2).complex();
        let a = random_poly(&mut rng, &shape);
        prop_assert_eq!(parse_classical(&render_classical(&a), dof).unwrap(), a);
        let x = random_operator(&mut rng, &shape);
        prop_assert_eq!(parse_operator(&render_operator(&x), dof).unwrap(), x);
    }

    #[test]
    fn json_round_trip(seed in any::<u64>(), dof in 1usize..=3) {
        let mut rng = rng(seed);
        let shape = Shape::new(dof, 5, 4).hbar(-2, 2).complex();
        let a = random_poly(&mut rng, &shape);
        let text = serde_json::to_string(&classical_to_json(&a)).unwrap();
        prop_assert!(!text.contains('.'), "floats leaked into {}", text);
        let back: PolynomialJson = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(classical_from_json(&back).unwrap(), a);
        let x = random_operator(&mut rng, &shape);
        let back: PolynomialJson = serde_json::from_str(&serde_json::to_string(&operator_to_json(&x)).unwrap()).unwrap();
        prop_assert_eq!(operator_from_json(&back).unwrap(), x);
    }
}

#[test]
fn verbs_produce_canonical_text() {
    assert_eq!(weylstar(&["star", "q0", "p0"]).1, "q0*p0 + 1/2*i*hbar\n");
    assert_eq!(weylstar(&["bracket", "q0^3", "p0^3"]).1, "9*i*hbar*q0^2*p0^2 - 3/2*i*hbar^3\n");
    assert_eq!(weylstar(&["poisson", "q0", "p0"]).1, "1\n");
    assert_eq!(weylstar(&["dequantize", "Q0*P0^2*Q0"]).1, "q0^2*p0^2 + 1/2*hbar^2\n");
    assert_eq!(weylstar(&["quantize", "q0*p0"]).1, "Q0*P0 - 1/2*i*hbar\n");
    assert_eq!(weylstar(&["--dof", "2", "dequantize", "Q0*P1 - P1*Q0"]).1, "0\n");
    assert_eq!(weylstar(&["--order", "2", "unitary", "q0"]).1, "[0] 1\n[1] -i*hbar^-1*q0\n[2] -1/2*hbar^-2*q0^2\n");
    assert_eq!(weylstar(&["--hbar", "1/2", "eval", "q0*p0 + hbar", "--at", "3,-1"]).1, "-5/2\n");
}

#[test]
fn series_csv_and_json() {
    let (code, csv, _) = weylstar(&["--order", "2", "--format", "csv", "evolve", "1/2*q0^2 + 1/2*p0^2", "q0"]);
    assert_eq!(code, 0);
    assert_eq!(csv, "n,term_index,q_exps,p_exps,hbar_pow,re,im\n0,0,1,0,0,1,0\n1,0,0,1,0,1,0\n2,0,1,0,0,-1/2,0\n");
    let (code, json, _) = weylstar(&["--format", "json", "star", "q0", "p0"]);
    assert_eq!(code, 0);
    let parsed: PolynomialJson = serde_json::from_str(&json).unwrap();
    assert_eq!(render_classical(&classical_from_json(&parsed).unwrap()), "q0*p0 + 1/2*i*hbar");
}

#[test]
fn trajectory_table() {
    let (code, csv, err) = weylstar(&[
        "--order",
        "6",
        "--hbar",
        "1",
        "--format",
        "csv",
        "evolve",
        "1/2*p0^2 + q0^4",
        "q0",
        "--at",
        "1,0",
        "--times",
        "0,1/10",
    ]);
    assert_eq!(code, 0, "{err}");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,moyal_value,poisson_value");
    assert_eq!(lines[1], "0,1,1");
    let row: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(row[0], "1/10");
    assert_ne!(row[1], row[2], "the hbar^2 term at order 6 separates the two columns");
}

#[test]
fn exit_codes() {
    assert_eq!(weylstar(&["star", "q0", "p0"]).0, 0);
    let (code, _, err) = weylstar(&["star", "q0 + * p0", "p0"]);
    assert_eq!(code, 2);
    assert!(err.contains("line 1, column"), "{err}");
    assert_eq!(weylstar(&["star", "q0"]).0, 2);
    assert_eq!(weylstar(&["--dof", "2", "star", "q5", "p0"]).0, 3);
    assert_eq!(weylstar(&["--format", "csv", "star", "q0", "p0"]).0, 3);
    assert_eq!(weylstar(&["--hbar", "-1", "star", "q0", "p0"]).0, 3);
    assert_eq!(weylstar(&["unitary", "q0"]).0, 3);
    assert_eq!(weylstar(&["--hbar", "1", "eval", "q0", "--at", "1,x"]).0, 2);
    assert_eq!(weylstar(&["--help"]).0, 0);
}

#[test]
fn output_is_deterministic_and_out_flag_writes_the_same_bytes() {
    let args = ["--dof", "2", "--order", "3", "--format", "json", "evolve", "1/2*p0^2 + q0^3*q1 + p1^2", "q0*p1"];
    let first = weylstar(&args);
    let second = weylstar(&args);
    assert_eq!(first, second);
    let path = scratch("series.json");
    let mut with_out: Vec<&str> = args.to_vec();
    let path_text = path.to_str().unwrap().to_string();
    with_out.extend(["--out", &path_text]);
    let (code, stdout, _) = weylstar(&with_out);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), first.1);
}

#[test]
fn classicality_from_config_file() {
    let path = scratch("state.json");
    std::fs::write(
        &path,
        r#"{
            "hbar": "1/100",
            "modes": [ { "mean": ["2", "-1"], "cov": ["1/200", "1/200", 0] } ],
            "center": ["2", "-1"],
            "margins": ["1/2", "1/2"],
            "observables": ["q0*p0 + q0^2"],
            "order": 2,
            "p_grid": [0.5, 0.9]
        }"#,
    )
    .unwrap();
    let path_text = path.to_str().unwrap();
    let (code, text, err) = weylstar(&["classicality", path_text]);
    assert_eq!(code, 0, "{err}");
    assert!(text.ends_with("verdict: 2-order classical\nconsistency q0: pass\nconsistency p0: pass\n"), "{text}");
    let (code, json, _) = weylstar(&["--format", "json", "classicality", path_text]);
    assert_eq!(code, 0);
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(value["classical"], serde_json::Value::Bool(true));
    assert!(value["results"][0]["norm"].is_string());

    std::fs::write(&path, r#"{ "modes": [ ] "#).unwrap();
    assert_eq!(weylstar(&["classicality", path_text]).0, 2);
    std::fs::write(
        &path,
        r#"{ "hbar": 1, "modes": [ { "mean": [0, 0], "cov": ["1/10", "1/10", 0] } ],
             "center": [0, 0], "margins": [1, 1], "observables": ["q0"], "order": 1 }"#,
    )
    .unwrap();
    let (code, _, err) = weylstar(&["classicality", path_text]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn operands_can_come_from_files() {
    let path = scratch("h.txt");
    std::fs::write(&path, "1/2*p0^2\n + 1/2*q0^2\n").unwrap();
    let operand = format!("@{}", path.display());
    let (code, out, err) = weylstar(&["--order", "1", "evolve", &operand, "q0"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out, "[0] q0\n[1] p0\n");
}
