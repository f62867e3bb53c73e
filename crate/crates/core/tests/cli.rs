use std::fs;
use std::path::{Path, PathBuf};

use rigidkit::cli::{run, Outcome, EXIT_INPUT, EXIT_NEGATIVE, EXIT_OK};
use serde_json::Value;

const QUAD_D3: &str = r#"{
  "d": 3,
  "vertices": ["v1", "v2", "v3", "v4"],
  "hyperedges": [
    {"vertices": ["v1"], "weight": 1, "pins": [[0.1, 0.3]]},
    {"vertices": ["v2"], "weight": 1, "pins": [[1.2, -0.2]]},
    {"vertices": ["v1", "v3"], "weight": 1, "pins": [[0.205, 0.72]]},
    {"vertices": ["v2", "v4"], "weight": 1, "pins": [[1.5, 0.58]]},
    {"vertices": ["v3", "v4"], "weight": 2, "pins": [[0.725, 1.4], [2.22, 0.94]]}
  ]
}"#;

const UNDER_PINNED: &str = r#"{
  "d": 3,
  "vertices": ["v1", "v2", "v3", "v4"],
  "hyperedges": [
    {"vertices": ["v1"], "weight": 1},
    {"vertices": ["v1", "v3"], "weight": 1},
    {"vertices": ["v2", "v4"], "weight": 1},
    {"vertices": ["v3", "v4"], "weight": 2}
  ]
}"#;

fn cli(args: &[&str]) -> Outcome {
    run(std::iter::once("rigidkit").chain(args.iter().copied()))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_quad_d3_is_minimally_rigid() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "quad_d3.json", QUAD_D3);
    let out = cli(&["--json", "check", arg(&inst)]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let doc: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(doc["class"], "minimally-rigid");
    assert_eq!(doc["generic_rank"], 8);
    assert_eq!(doc["oracles_agree"], true);
}

#[test]
fn check_under_pinned_is_flexible() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "flex.json", UNDER_PINNED);
    let out = cli(&["check", arg(&inst)]);
    assert_eq!(out.code, EXIT_NEGATIVE);
    assert!(out.stdout.starts_with("flexible"), "{}", out.stdout);
}

#[test]
fn decompose_and_drplan_need_tight_input() {
    let dir = tempfile::tempdir().unwrap();
    let tight = write(dir.path(), "quad_d3.json", QUAD_D3);
    let loose = write(dir.path(), "flex.json", UNDER_PINNED);
    assert_eq!(cli(&["decompose", arg(&tight)]).code, EXIT_OK);
    assert_eq!(cli(&["decompose", arg(&loose)]).code, EXIT_NEGATIVE);
    assert_eq!(cli(&["drplan", arg(&tight)]).code, EXIT_OK);
    assert_eq!(cli(&["drplan", arg(&loose)]).code, EXIT_NEGATIVE);
    let sparse = cli(&["--json", "sparsity", arg(&loose)]);
    let doc: Value = serde_json::from_str(&sparse.stdout).unwrap();
    assert_eq!(doc["sparse"], true);
}

#[test]
fn solve_quad_d3_both_ways() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "quad_d3.json", QUAD_D3);
    for extra in [&[][..], &["--plan"][..]] {
        let mut args = vec!["--json", "solve", arg(&inst)];
        args.extend_from_slice(extra);
        let out = cli(&args);
        assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
        let doc: Value = serde_json::from_str(&out.stdout).unwrap();
        assert!(doc["residual"].as_f64().unwrap() <= 1e-8);
        assert!(doc["points"]["v4"].is_array());
    }
}

#[test]
fn gen_and_learn_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("x.json");
    let a = cli(&["--seed", "7", "gen", "-d", "3", "-s", "2", "-m", "24"]);
    let b = cli(&["--seed", "7", "gen", "-d", "3", "-s", "2", "-m", "24"]);
    assert_eq!(a.code, EXIT_OK);
    assert_eq!(a.stdout, b.stdout);
    fs::write(&data, &a.stdout).unwrap();
    let l1 = cli(&["--json", "--seed", "3", "learn", arg(&data), "-s", "2"]);
    let l2 = cli(&["--json", "--seed", "3", "learn", arg(&data), "-s", "2"]);
    assert_eq!(l1.code, EXIT_OK, "{}", l1.stderr);
    assert_eq!(l1.stdout, l2.stdout);
    let doc: Value = serde_json::from_str(&l1.stdout).unwrap();
    assert_eq!(doc["n"], 12);
    assert_eq!(doc["verification"]["pass"], true);
}

#[test]
fn learn_fitted_from_planted_data() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("planted.json");
    let hidden = dir.path().join("hidden.json");
    let g = cli(&[
        "--seed",
        "5",
        "gen",
        "-d",
        "3",
        "-s",
        "2",
        "-m",
        "24",
        "--kind",
        "planted",
        "--hidden",
        arg(&hidden),
        "-o",
        arg(&data),
    ]);
    assert_eq!(g.code, EXIT_OK, "{}", g.stderr);
    assert!(hidden.exists());
    let out = cli(&["--json", "learn", arg(&data), "--mode", "fitted"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let doc: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(doc["n"], 12);
    assert_eq!(doc["non_generic_data"], false);
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"d\": 3, \"vertices\": [\"a\"]");
    let data = write(dir.path(), "x.txt", "1 0 0\n0 1 0\n0 0 1\n");
    assert_eq!(cli(&["check", arg(&bad)]).code, EXIT_INPUT);
    assert_eq!(
        cli(&["check", "/nonexistent/instance.json"]).code,
        EXIT_INPUT
    );
    assert_eq!(cli(&["learn", arg(&data), "-s", "3"]).code, EXIT_INPUT);
    assert_eq!(cli(&["learn", arg(&data), "-s", "2"]).code, EXIT_INPUT);
    assert_eq!(
        cli(&["learn", arg(&data), "--mode", "fitted"]).code,
        EXIT_INPUT
    );
    let small = cli(&["gen", "-d", "3", "-s", "2", "-m", "9"]);
    assert_eq!(small.code, EXIT_INPUT);
    assert!(small.stderr.contains("10"), "{}", small.stderr);
    assert_eq!(cli(&["frobnicate"]).code, EXIT_INPUT);
    assert_eq!(
        cli(&["learn", arg(&data), "-s", "2", "--restarts", "0"]).code,
        EXIT_INPUT
    );
}

#[test]
fn help_exits_cleanly() {
    let out = cli(&["--help"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("learn"));
}
