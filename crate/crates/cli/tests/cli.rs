use std::path::Path;
use std::process::{Command, Output};

use clustered::engine::Certificate;
use clustered::model::AnyModel;
use clustered::Graph;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clustered")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&o.stdout)))
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

#[test]
fn generate_then_analyse() {
    let dir = tempfile::tempdir().unwrap();
    let (g, m, dot) = (p(dir.path(), "g.json"), p(dir.path(), "m.json"), p(dir.path(), "g.dot"));
    let o = run(&["generate", "--family", "path-clique", "--k", "2", "--c", "3", "--out", &g, "--model", &m, "--dot", &dot]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["n"], 5);
    let graph = Graph::from_json_str(&std::fs::read_to_string(&g).unwrap()).unwrap();
    AnyModel::from_json_str(&std::fs::read_to_string(&m).unwrap()).unwrap();
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("graph G {"));

    let o = run(&["alpha", "exact", "--c", "3", "--graph", &g]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["alpha"], 3);
    let o = run(&["alpha", "exact", "--c", "3", "--graph", &g, "--model", &m, "--engine", "treedp"]);
    assert_eq!(json(&o)["alpha"], 3);

    let o = run(&["alpha", "bound", "--algo", "general", "--c", "3", "--graph", &g, "--model", &m]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["guarantee"], "ceil(3*5/(2+3+1))");
    assert!(v["size"].as_u64().unwrap() >= 3);

    let set = p(dir.path(), "s.json");
    std::fs::write(&set, serde_json::to_string(&v).unwrap()).unwrap();
    let o = run(&["verify-set", "--c", "3", "--graph", &g, "--set", &set]);
    assert_eq!(code(&o), 0);
    std::fs::write(&set, format!("{:?}", (0..graph.n()).collect::<Vec<_>>())).unwrap();
    let o = run(&["verify-set", "--c", "3", "--graph", &g, "--set", &set]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["valid"], false);

    let o = run(&["validate-model", "--graph", &g, "--model", &m]);
    assert_eq!(code(&o), 0);
}

#[test]
fn c2_bound_and_model_violations() {
    let dir = tempfile::tempdir().unwrap();
    let (g, m) = (p(dir.path(), "g.json"), p(dir.path(), "m.json"));
    let o = run(&["generate", "--family", "random-ktree", "--k", "3", "--n", "60", "--seed", "4", "--out", &g, "--model", &m]);
    assert_eq!(code(&o), 0);
    let o = run(&["alpha", "bound", "--algo", "c2", "--graph", &g, "--model", &m]);
    assert_eq!(code(&o), 0);
    assert!(json(&o)["size"].as_u64().unwrap() >= 24);
    let o = run(&["alpha", "bound", "--algo", "c2", "--c", "3", "--graph", &g, "--model", &m]);
    assert_eq!(code(&o), 2);

    // A path model cannot explain a triangle: 0 and 2 are adjacent with equal labels.
    std::fs::write(&g, r#"{"n":3,"edges":[[0,1],[0,2],[1,2]]}"#).unwrap();
    std::fs::write(&m, r#"{"k":1,"root":0,"parent":[-1,0,1],"label":[1,2,1]}"#).unwrap();
    let o = run(&["validate-model", "--graph", &g, "--model", &m]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["violations"][0]["reason"], "equal_labels");
}

#[test]
fn certify_and_refute_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path(), "cert.json");
    let o = run(&["certify", "--c", "3", "--ratio", "5/9", "--out", &out]);
    assert_eq!(code(&o), 0);
    let cert = Certificate::from_json_str(&String::from_utf8(o.stdout.clone()).unwrap()).unwrap();
    cert.verify().unwrap();
    assert_eq!(std::fs::read_to_string(&out).unwrap().trim(), String::from_utf8(o.stdout).unwrap().trim());

    let o = run(&["certify", "--c", "3", "--ratio", "3/5"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["certified"], false);

    let o = run(&["refute", "--c", "3", "--ratio", "3/5", "--max-n", "30"]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    let (alpha, n) = (v["witness"]["alpha"].as_i64().unwrap(), v["witness"]["n"].as_i64().unwrap());
    assert!(5 * alpha < 3 * n);

    let o = run(&["refute", "--c", "3", "--ratio", "1/2", "--max-n", "30"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["outcome"], "not_found");
}

#[test]
fn find_ratio_reports_successor() {
    let o = run(&["find-ratio", "--c", "2", "--max-q", "8", "--refute-max-n", "12"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["best"], "1/2");
    assert_eq!(v["successor"], "4/7");
    assert!(v["witness"]["n"].as_u64().is_some());
}

#[test]
fn table_is_deterministic() {
    let a = run(&["table", "--c-from", "2", "--c-to", "6"]);
    let b = run(&["table", "--c-from", "2", "--c-to", "6"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let ratios: Vec<&str> = text.lines().skip(1).map(|l| l.split('\t').nth(1).unwrap()).collect();
    assert_eq!(ratios, ["1/2", "5/9", "8/13", "2/3", "9/13"]);
}

#[test]
fn usage_errors_and_caps() {
    assert_eq!(code(&run(&["certify", "--c", "3"])), 2);
    assert_eq!(code(&run(&["certify", "--c", "3", "--ratio", "5/9", "--nope"])), 2);
    assert_eq!(code(&run(&["certify", "--c", "3", "--ratio", "10/18"])), 2);
    assert_eq!(code(&run(&["verify-set", "--c", "2", "--graph", "/nonexistent/g.json", "--set", "/nonexistent/s.json"])), 2);
    assert_eq!(code(&run(&["generate", "--family", "random-ktree", "--k", "2", "--n", "9", "--out", "x.json"])), 2);
    assert_eq!(code(&run(&["generate", "--family", "gi-chain", "--i", "2", "--out", "/nonexistent/dir/g.json"])), 2);
    assert_eq!(code(&run(&["generate", "--family", "cary-tower", "--k", "40", "--c", "40", "--out", "x.json"])), 3);
    assert_eq!(code(&run(&["refute", "--c", "3", "--ratio", "9/16", "--max-n", "40", "--max-profiles", "50"])), 3);
}

#[test]
fn brute_force_budget_is_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let g = p(dir.path(), "g.json");
    run(&["generate", "--family", "gi-chain", "--i", "2", "--out", &g]);
    let o = run(&["alpha", "exact", "--c", "3", "--graph", &g, "--engine", "brute", "--budget", "10"]);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["exact"], false);
}
