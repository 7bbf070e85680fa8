//! End-to-end tests of the `mubkit` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn mubkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mubkit")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn write(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen(dir: &TempDir, n: u64, extra: &[&str]) -> PathBuf {
    let p = dir.path().join(format!("s{n}.json"));
    let dim = n.to_string();
    let mut args = vec!["gen", "--dim", &dim, "--out", s(&p)];
    args.extend_from_slice(extra);
    let out = mubkit(&args);
    assert_eq!(code(&out), 0, "gen {n}: {}", String::from_utf8_lossy(&out.stderr));
    p
}

#[test]
fn generated_systems_verify() {
    let dir = TempDir::new().unwrap();
    for n in [2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27] {
        let p = gen(&dir, n, &[]);
        let out = mubkit(&["verify", s(&p)]);
        assert_eq!(code(&out), 0, "verify {n}");
        let v = stdout_json(&out);
        assert_eq!(v["is_complete"], json!(true), "n={n}: {v}");
        assert_eq!(v["bases"], json!(n + 1));
        assert_eq!(v["schur_criterion"]["complete"], json!(true));
    }
}

#[test]
fn generator_variants_verify() {
    let dir = TempDir::new().unwrap();
    for (n, flags) in [
        (9u64, vec!["--odd-square"]),
        (8, vec!["--even-halfsquare"]),
        (27, vec!["--family", "coulter-matthews", "--alpha", "1"]),
        (27, vec!["--family", "ding-yuan", "--u", "1"]),
    ] {
        let p = gen(&dir, n, &flags);
        assert_eq!(code(&mubkit(&["verify", s(&p)])), 0, "n={n} {flags:?}");
    }
}

#[test]
fn bad_generator_input_is_a_usage_error() {
    let out = mubkit(&["gen", "--dim", "6"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("prime power"));
    let out = mubkit(&["gen", "--dim", "4", "--family", "dembowski-ostrom", "--alpha", "1"]);
    assert_eq!(code(&out), 2);
    assert_eq!(code(&mubkit(&["verify", "/nonexistent.json"])), 2);
}

#[test]
fn perturbed_system_fails_verification() {
    let dir = TempDir::new().unwrap();
    let p = gen(&dir, 5, &["--perturb", "--seed", "7"]);
    let out = mubkit(&["verify", s(&p)]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout_json(&out)["is_complete"], json!(false));
}

#[test]
fn output_is_byte_stable() {
    let dir = TempDir::new().unwrap();
    let a = std::fs::read(gen(&dir, 9, &[])).unwrap();
    let b = mubkit(&["gen", "--dim", "9"]).stdout;
    assert_eq!(a, b);
    let p = gen(&dir, 4, &[]);
    assert_eq!(mubkit(&["verify", s(&p)]).stdout, mubkit(&["verify", s(&p)]).stdout);
}

#[test]
fn float_backend_agrees() {
    let dir = TempDir::new().unwrap();
    let p = gen(&dir, 7, &[]);
    assert_eq!(code(&mubkit(&["--backend", "float", "verify", s(&p)])), 0);
    assert_eq!(code(&mubkit(&["--backend", "float", "welch", s(&p), "--k", "2"])), 0);
    let bad = gen(&dir, 3, &["--perturb"]);
    assert_eq!(code(&mubkit(&["--backend", "float", "verify", s(&bad)])), 1);
}

#[test]
fn welch_on_a_single_basis() {
    let dir = TempDir::new().unwrap();
    let one = write(
        &dir,
        "one.json",
        &json!({"dim": 3, "bases": [{"nroot": 1, "normalized": false,
            "phases": [[0, null, null], [null, 0, null], [null, null, 0]]}]}),
    );
    let out = mubkit(&["welch", s(&one), "--k", "2"]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert_eq!(v["wset_attained"], json!(false));
    assert!(!v["witness"].is_null());
    assert_eq!(code(&mubkit(&["welch", s(&one), "--k", "1"])), 0);
}

#[test]
fn lgraph_outputs() {
    let dir = TempDir::new().unwrap();
    let f3 = write(&dir, "f3.json", &json!({"nroot": 3, "normalized": true, "phases": [[0, 0, 0], [0, 1, 2], [0, 2, 1]]}));
    let dot = dir.path().join("g.dot");
    let out = mubkit(&["lgraph", s(&f3), "--solve", "--dot", s(&dot)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["clique_number"], json!(3));
    assert_eq!(v["chromatic_number"], json!(3));
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("graph"));
    assert!(text.contains("\"0,1\""));
    let out = mubkit(&["lgraph", s(&f3), "--cover", s(&f3)]);
    assert_eq!(code(&out), 1, "a Hadamard does not cover its own L-graph complement");
}

#[test]
fn planar_check_levels() {
    let dir = TempDir::new().unwrap();
    let hs2 = write(&dir, "hs2.json", &json!({"group": {"moduli": [2]}, "table": [[[0], [0]], [[1], "1/2"]]}));
    assert_eq!(code(&mubkit(&["planar", "check", s(&hs2), "--condition", "general"])), 0);
    assert_eq!(code(&mubkit(&["planar", "check", s(&hs2), "--condition", "uslovie"])), 2);
    let lin = write(&dir, "lin.json", &json!({"group": {"moduli": [3]}, "table": [[[0], 0], [[1], 1], [[2], 2]]}));
    let out = mubkit(&["planar", "check", s(&lin), "--condition", "uslovie"]);
    assert_eq!(code(&out), 1);
    assert!(!stdout_json(&out)["witness"].is_null());
}

#[test]
fn rds_commands() {
    let dir = TempDir::new().unwrap();
    let z4 = write(&dir, "z4.json", &json!({"K": {"moduli": [4]}, "N": [[0], [2]], "R": [[0], [1]], "params": [2, 2, 2, 1]}));
    assert_eq!(code(&mubkit(&["rds", "check", s(&z4)])), 0);
    let out = mubkit(&["rds", "to-planar", s(&z4)]);
    assert_eq!(code(&out), 0);
    let f = dir.path().join("f.json");
    std::fs::write(&f, &out.stdout).unwrap();
    assert_eq!(code(&mubkit(&["planar", "check", s(&f), "--condition", "general"])), 0);
    let hs2 = write(&dir, "hs2.json", &json!({"group": {"moduli": [2]}, "table": [[[0], [0]], [[1], "1/2"]]}));
    let out = mubkit(&["rds", "from-planar", s(&hs2)]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["K"]["carry"], json!([[1]]));
    let bad = write(&dir, "bad.json", &json!({"K": {"moduli": [4]}, "N": [[0], [2]], "R": [[0], [2]], "params": [2, 2, 2, 1]}));
    assert_eq!(code(&mubkit(&["rds", "check", s(&bad)])), 1);
}
