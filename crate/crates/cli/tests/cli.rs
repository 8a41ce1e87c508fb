use std::path::Path;
use std::process::{Command, Output};

fn synroute(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_synroute")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = synroute(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn full_pipeline_on_a_synthetic_world() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let idx = p(d, "idx");
    ok(&["synth", "--out", d.to_str().unwrap(), "--train", "120", "--test", "30", "--seed", "3"]);
    ok(&["index", "--corpus", &p(d, "corpus.jsonl"), "--out", &idx]);

    let feats = ok(&["featurize", "--parses", &p(d, "test_parses.jsonl"), "--out", &p(d, "f.csv")]);
    assert!(feats.contains("30 of 30"));
    let csv = std::fs::read_to_string(d.join("f.csv")).unwrap();
    assert_eq!(csv.lines().count(), 31);
    assert!(csv.starts_with("query_id,W,S,C,DC,T,CT,CP,CN,VP,MLS"));

    let data = ["--index", idx.as_str(), "--queries", &p(d, "train.jsonl"), "--parses", &p(d, "train_parses.jsonl")];
    let trained = ok(&[&["train-adapter"][..], &data].concat());
    assert!(trained.contains("train accuracy"));
    assert!(d.join("idx/adapter.json").exists() && d.join("idx/schema.json").exists());

    let tuned = ok(&[&["tune"][..], &data].concat());
    assert!(tuned.starts_with("tau_low="));

    let test = ["--index", idx.as_str(), "--queries", &p(d, "test.jsonl"), "--parses", &p(d, "test_parses.jsonl")];
    let dense = ok(&[&["eval", "--mode", "dense-only"][..], &test].concat());
    assert!(dense.contains("mode DENSE_ONLY  n=30"));
    let full = ok(&[&["eval", "--mode", "full", "--records", &p(d, "r.csv")][..], &test].concat());
    assert!(full.contains("mode FULL"));
    assert_eq!(std::fs::read_to_string(d.join("r.csv")).unwrap().lines().count(), 31);

    ok(&[&["bench", "--csv", &p(d, "bench.csv")][..], &test].concat());
    let bench = std::fs::read_to_string(d.join("bench.csv")).unwrap();
    let modes: Vec<&str> = bench.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(modes, ["GENERATOR_ONLY", "DENSE_ONLY", "GRAPH_ONLY", "ROUTED_NO_FUSION", "FULL"]);

    let lines = ok(&["query", "--index", &idx, "--file", &p(d, "test.jsonl"), "--parses", &p(d, "test_parses.jsonl")]);
    assert_eq!(lines.lines().count(), 30);
    for l in lines.lines() {
        let v: serde_json::Value = serde_json::from_str(l).unwrap();
        assert!(v["score"].is_f64());
        assert_eq!(v["evidence"].as_array().unwrap().len(), 5);
    }
}

#[test]
fn case_study_answers_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let idx = p(d, "idx");
    ok(&["synth", "--out", d.to_str().unwrap(), "--case-study"]);
    ok(&["index", "--corpus", &p(d, "corpus.jsonl"), "--out", &idx]);
    let out = ok(&["query", "--index", &idx, "--question", "Who directed The Organization?", "--mode", "graph-only"]);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["path"], "GRAPH");
    assert!(v["evidence"].as_array().unwrap().iter().any(|e| e == "the-organization"));
}

#[test]
fn errors_exit_nonzero_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = synroute(&["index", "--corpus", &p(d, "missing.jsonl"), "--out", &p(d, "idx")]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("file not found"));

    ok(&["synth", "--out", d.to_str().unwrap(), "--case-study"]);
    ok(&["index", "--corpus", &p(d, "corpus.jsonl"), "--out", &p(d, "idx")]);
    // FULL needs a parse and a trained adapter.
    let out = synroute(&["query", "--index", &p(d, "idx"), "--question", "When?"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no parse available"));

    let out = synroute(&[
        "eval",
        "--index",
        &p(d, "idx"),
        "--queries",
        &p(d, "test.jsonl"),
        "--parses",
        &p(d, "test_parses.jsonl"),
        "--mode",
        "sideways",
    ]);
    assert!(!out.status.success());
}
