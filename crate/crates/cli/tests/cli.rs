use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diamcover")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json_file(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn fixture(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name);
    root.to_str().unwrap().to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn random_instance(dir: &TempDir, n: usize, seed: u64) -> PathBuf {
    let path = dir.path().join(format!("r{n}_{seed}.json"));
    let out = run(&[
        "generate",
        "random",
        "--n",
        &n.to_string(),
        "--seed",
        &seed.to_string(),
        "--box",
        "5",
        "--output",
        s(&path),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn dp_and_brute_force_agree() {
    let dir = TempDir::new().unwrap();
    for seed in 0..5 {
        let inst = random_instance(&dir, 10, seed);
        let mut ks = Vec::new();
        for oracle in ["dp", "brute", "bnb"] {
            let out = run(&["solve", "--input", s(&inst), "--oracle", oracle, "--verify"]);
            assert_eq!(code(&out), 0);
            let v: Value = serde_json::from_slice(&out.stdout).unwrap();
            assert_eq!(v["verified"], true);
            ks.push(v["k"].as_u64().unwrap());
        }
        assert!(ks.iter().all(|&k| k == ks[0]), "{ks:?}");
    }
}

#[test]
fn empty_instance_needs_no_cliques() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("empty.json");
    std::fs::write(&path, r#"{"dim": 2, "diameter": "2", "points": []}"#).unwrap();
    let out = run(&["solve", "--input", s(&path)]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["k"], 0);
    assert!(v["stats"].get("wall_ms").is_none());
}

#[test]
fn input_errors_exit_with_2() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "not json").unwrap();
    let out = run(&["solve", "--input", s(&path)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed"));
    assert_eq!(code(&run(&["solve", "--input", s(&dir.path().join("missing.json"))])), 2);
    assert_eq!(code(&run(&["solve"])), 2);
}

#[test]
fn resource_caps_exit_with_3() {
    let dir = TempDir::new().unwrap();
    let inst = random_instance(&dir, 14, 3);
    let out = run(&["solve", "--input", s(&inst), "--max-table-entries", "0"]);
    assert_eq!(code(&out), 3);
    let out = run(&["solve", "--input", s(&inst), "--lambda", "0", "--halfplanes", "0", "--lambda-cap", "0"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn random_generation_is_deterministic() {
    let a = run(&["generate", "random", "--n", "10", "--seed", "1"]);
    let b = run(&["generate", "random", "--n", "10", "--seed", "1"]);
    let c = run(&["generate", "random", "--n", "10", "--seed", "2"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn color3_writes_instance_and_certificate() {
    let dir = TempDir::new().unwrap();
    let graph = dir.path().join("k4.json");
    std::fs::write(&graph, r#"{"n": 4, "edges": [[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]]}"#).unwrap();
    let inst = dir.path().join("k4_instance.json");
    let out = run(&["generate", "color3", "--graph", s(&graph), "--output", s(&inst)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_file(&inst);
    assert_eq!(v["target_k"], 3);
    assert_eq!(v["dim"], 5);
    assert_eq!(v["points"].as_array().unwrap().len(), 4 + 4 * 6 + 2);
    let cert = json_file(&inst.with_extension("certificate.json"));
    assert_eq!(cert["target_k"], 3);
    assert_eq!(cert["exact_recheck"], true);
    assert!(cert["margins"]["far_min"].as_f64().unwrap() > 0.0);
}

#[test]
fn sat_generation_reports_the_target() {
    let out = run(&[
        "generate",
        "sat",
        "--formula",
        &fixture("phi_u.formula.json"),
        "--embedding",
        &fixture("phi_u.embedding.json"),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    // three variables and 34 wire edges after refinement
    assert_eq!(v["target_k"], 3 + 34 / 2);
    assert_eq!(v["diameter"], "1");
}

#[test]
fn sat_generation_rejects_irreducible_formulas() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("f.json");
    std::fs::write(&f, r#"{"variables": 1, "clauses": [[1], [-1]]}"#).unwrap();
    let out = run(&["generate", "sat", "--formula", s(&f), "--embedding", &fixture("phi_s.embedding.json")]);
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_accepts_solutions_and_rejects_tampered_covers() {
    let dir = TempDir::new().unwrap();
    let inst = random_instance(&dir, 9, 7);
    let result = dir.path().join("result.json");
    assert_eq!(code(&run(&["solve", "--input", s(&inst), "--output", s(&result)])), 0);
    assert_eq!(code(&run(&["verify", "--input", s(&inst), "--cover", s(&result)])), 0);
    let mut v = json_file(&result);
    let cliques = v["cover"]["cliques"].as_array_mut().unwrap();
    cliques.pop();
    let bad = dir.path().join("bad_cover.json");
    std::fs::write(&bad, v["cover"].to_string()).unwrap();
    assert_eq!(code(&run(&["verify", "--input", s(&inst), "--cover", s(&bad)])), 1);
    assert_eq!(code(&run(&["verify", "--input", s(&inst), "--cover", s(&bad), "--partial"])), 0);
}

#[test]
fn certification_margins_do_not_shrink_with_precision() {
    let dir = TempDir::new().unwrap();
    let graph = dir.path().join("k3.json");
    std::fs::write(&graph, r#"{"n": 3, "edges": [[0,1],[0,2],[1,2]]}"#).unwrap();
    let mut last = 0.0;
    for bits in ["256", "1024"] {
        let out = run(&["certify", "--graph", s(&graph), "--precision", bits]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["accepted"], true);
        let m = v["margins"]["far_min"].as_f64().unwrap().min(v["margins"]["near_min"].as_f64().unwrap());
        assert!(m >= last);
        last = m;
    }
}

#[test]
fn bench_emits_one_row_per_size_and_seed() {
    let out = run(&["bench", "--sizes", "20,30,40", "--seeds", "2", "--jobs", "2"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,seed,k,wall_ms,width");
    assert_eq!(lines.len(), 1 + 3 * 2);
    assert!(lines[1].starts_with("20,0,"));
}

#[test]
fn decompose_and_cliques_dump_json() {
    let dir = TempDir::new().unwrap();
    let inst = random_instance(&dir, 12, 2);
    let out = run(&["decompose", "--input", s(&inst)]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(!v["nice"]["nodes"].as_array().unwrap().is_empty());
    let out = run(&["cliques", "--input", s(&inst)]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    for class in v["classes"].as_array().unwrap() {
        assert!(!class["cliques"].as_array().unwrap().is_empty());
    }
}
