mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn folkmotif(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_folkmotif")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn ok(args: &[&str]) -> Output {
    let out = folkmotif(args);
    assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Fixture corpus through ingest, tokenize and split into `dir`.
fn prepare(dir: &Path) {
    let fx = common::fixtures();
    let german = format!("german={}", s(&fx.join("german")));
    let chinese = format!("chinese={}", s(&fx.join("chinese")));
    let corpus = dir.join("corpus.jsonl");
    ok(&["ingest", "--source", &german, "--source", &chinese, "--out", s(&corpus)]);
    let tokens = dir.join("tokens.txt");
    ok(&["tokenize", "--corpus", s(&corpus), "--mode", "intervallic", "--mw-size", "2", "--out", s(&tokens)]);
    ok(&["split", "--tokens", s(&tokens), "--seed", "3", "--train-out", s(&dir.join("train.txt")), "--test-out", s(&dir.join("test.txt"))]);
}

fn embed(dir: &Path, tag: &str) -> (Vec<u8>, Vec<u8>) {
    let emb = dir.join(format!("emb-{tag}.txt"));
    let vocab = dir.join(format!("vocab-{tag}.tsv"));
    ok(&[
        "train-embeddings", "--tokens", s(&dir.join("train.txt")), "--out", s(&emb), "--vocab-out", s(&vocab),
        "--dim", "8", "--epochs", "3", "--seed", "5", "--deterministic",
    ]);
    (fs::read(emb).unwrap(), fs::read(vocab).unwrap())
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&folkmotif(&[])), 1);
    assert_eq!(code(&folkmotif(&["tokenize", "--corpus", "x", "--mw-size", "4"])), 1);
    assert_eq!(code(&folkmotif(&["experiment", "3", "--config", "x"])), 1);
    assert_eq!(code(&folkmotif(&["--help"])), 0);
}

#[test]
fn missing_input_exits_two() {
    let out = folkmotif(&["ingest", "--source", "x=/nonexistent/dir"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn ingest_reports_skipped_files() {
    let fx = common::fixtures();
    let out = ok(&["ingest", "--source", &format!("bad={}", s(&fx.join("bad"))), "--source", &format!("g={}", s(&fx.join("german")))]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("poly.krn") && err.contains("tie.krn"), "{err}");
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 13);
}

#[test]
fn deterministic_stages_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    prepare(dir.path());
    let train = fs::read(dir.path().join("train.txt")).unwrap();
    let test = fs::read(dir.path().join("test.txt")).unwrap();
    let again = tempfile::tempdir().unwrap();
    prepare(again.path());
    assert_eq!(train, fs::read(again.path().join("train.txt")).unwrap());
    assert_eq!(test, fs::read(again.path().join("test.txt")).unwrap());
    assert_eq!(embed(dir.path(), "a"), embed(dir.path(), "b"));
}

#[test]
fn similar_lists_neighbours_or_reports_an_unknown_token() {
    let dir = tempfile::tempdir().unwrap();
    prepare(dir.path());
    embed(dir.path(), "a");
    let emb = dir.path().join("emb-a.txt");
    let first = fs::read_to_string(dir.path().join("vocab-a.tsv")).unwrap().lines().next().unwrap().split('\t').next().unwrap().to_string();
    let out = ok(&["similar", &first, "--embeddings", s(&emb), "--k", "3"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 3);

    let out = folkmotif(&["similar", "no_such_token", "--embeddings", s(&emb)]);
    assert_eq!(code(&out), 2);
    assert_eq!(code(&folkmotif(&["similar", &first, "--embeddings", s(&emb), "--k", "0"])), 1);
}

#[test]
fn classifier_train_and_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    prepare(d);
    embed(d, "a");
    let (emb, vocab, model) = (d.join("emb-a.txt"), d.join("vocab-a.tsv"), d.join("model.ckpt"));
    ok(&[
        "train-classifier", "--tokens", s(&d.join("train.txt")), "--embeddings", s(&emb), "--vocab", s(&vocab), "--out", s(&model),
        "--hidden", "4", "--attention-dim", "3", "--epochs", "3", "--deterministic",
    ]);
    let (alpha, metrics) = (d.join("alpha.csv"), d.join("metrics.json"));
    let out = ok(&[
        "evaluate", "--model", s(&model), "--tokens", s(&d.join("test.txt")), "--embeddings", s(&emb), "--vocab", s(&vocab),
        "--alpha-out", s(&alpha), "--metrics-out", s(&metrics),
    ]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("german"));
    assert!(fs::read_to_string(&alpha).unwrap().starts_with("song,position,motif,weight\n"));
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(&metrics).unwrap()).unwrap();
    assert!(m["accuracy"].as_f64().is_some(), "{m}");

    // A vocabulary other than the training one is refused.
    fs::write(d.join("other.tsv"), fs::read_to_string(&vocab).unwrap().replacen('\t', "x\t", 1)).unwrap();
    let out = folkmotif(&[
        "evaluate", "--model", s(&model), "--tokens", s(&d.join("test.txt")), "--embeddings", s(&emb), "--vocab", s(&d.join("other.tsv")),
    ]);
    assert_eq!(code(&out), 2);

    let out = folkmotif(&[
        "train-classifier", "--tokens", s(&d.join("train.txt")), "--embeddings", s(&emb), "--vocab", s(&vocab), "--out", s(&model),
        "--hidden", "4", "--attention-dim", "3", "--epochs", "3", "--lr", "1e300", "--clip", "0", "--deterministic",
    ]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn baselines_from_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    prepare(d);
    embed(d, "a");
    for kind in ["average", "doc2vec"] {
        let vectors = d.join(format!("{kind}.txt"));
        ok(&[
            "baseline", kind, "--train", s(&d.join("train.txt")), "--test", s(&d.join("test.txt")), "--embeddings", s(&d.join("emb-a.txt")),
            "--vocab", s(&d.join("vocab-a.tsv")), "--doc-epochs", "3", "--infer-epochs", "5", "--vectors-out", s(&vectors),
        ]);
        assert!(vectors.is_file());
    }
}

#[test]
fn experiment_needs_the_right_number_of_labels() {
    let dir = tempfile::tempdir().unwrap();
    let fx = common::fixtures();
    let config = dir.path().join("cfg.json");
    let body = serde_json::json!({
        "corpora": [{"path": fx.join("german"), "label": "german"}, {"path": fx.join("chinese"), "label": "chinese"}],
        "output_dir": dir.path().join("out"),
        "embedding": {"dim": 8, "epochs": 2},
        "network": {"hidden": 4, "attention_dim": 3, "epochs": 2},
        "doc2vec": {"epochs": 2, "infer_epochs": 2},
    });
    fs::write(&config, body.to_string()).unwrap();
    assert_eq!(code(&folkmotif(&["experiment", "2", "--config", s(&config)])), 2);
    let out = ok(&["experiment", "1", "--config", s(&config)]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("average+svm"));
    assert!(dir.path().join("out/metrics.json").is_file());

    fs::write(&config, r#"{"models": ["attention"], "bogus": 1}"#).unwrap();
    assert_eq!(code(&folkmotif(&["experiment", "1", "--config", s(&config)])), 1);
}

#[test]
fn synthetic_corpus_is_valid_jsonl() {
    let out = ok(&["synth-corpus", "--songs-per-class", "5", "--classes", "3"]);
    let melodies = folkmotif::jsonl::read_jsonl(&out.stdout).unwrap();
    assert_eq!(melodies.len(), 15);
}
