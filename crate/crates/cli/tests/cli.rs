use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

const BIN: &str = env!("CARGO_BIN_EXE_absa-forge");

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN).current_dir(dir).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))).unwrap()
}

const CATS: [&str; 5] = ["FOOD#QUALITY", "SERVICE#GENERAL", "AMBIENCE#GENERAL", "DRINKS#PRICES", "LOCATION#GENERAL"];
const SENTS: [&str; 3] = ["positive", "negative", "neutral"];
const ASPECTS: [&str; 6] = ["burger", "staff", "decor", "wine", "view", "pasta"];
const OPINIONS: [&str; 5] = ["good", "slow", "cozy", "pricey", "lovely"];

/// Writes a quad-format file with `n` lines and a deterministic spread of
/// categories and sentiments.
fn quad_file(path: &Path, n: usize) {
    let mut out = String::new();
    for i in 0..n {
        let (a, c, s, o) = (ASPECTS[i % 6], CATS[(i * 7 / 3) % 5], SENTS[(i / 2) % 3], OPINIONS[i % 5]);
        let aspect = if i % 11 == 0 { "NULL" } else { a };
        out.push_str(&format!("The {a} was {o} number {i} ####[['{aspect}', '{c}', '{s}', '{o}']]\n"));
    }
    fs::write(path, out).unwrap();
}

fn restaurant(dir: &Path, n: usize) -> PathBuf {
    let data = dir.join("data");
    fs::create_dir_all(&data).unwrap();
    quad_file(&dir.join("raw_train.txt"), n);
    quad_file(&dir.join("raw_test.txt"), 12);
    let o = run(dir, &["import", "--input", "raw_train.txt", "--format", "quad", "--out", "data/train.jsonl"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = run(dir, &["import", "--input", "raw_test.txt", "--format", "quad", "--out", "data/test.jsonl"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    data
}

fn laptop(dir: &Path) -> PathBuf {
    fs::write(
        dir.join("lap_train.txt"),
        "The screen is bright####[([1], [3], 'POS')]\nBad keyboard####[([1], [0], 'NEG')]\n",
    )
    .unwrap();
    let o = run(dir, &["import", "--input", "lap_train.txt", "--format", "aste", "--out", "lap.jsonl"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    dir.join("lap.jsonl")
}

fn sha256(path: &Path) -> String {
    hex::encode(Sha256::digest(fs::read(path).unwrap()))
}

#[test]
fn help_documents_joiner_and_schema_version() {
    let o = Command::new(BIN).arg("--help").output().unwrap();
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("\" [SSEP] \""), "{text}");
    assert!(text.contains(r#""format":"absa-forge/canonical","version":1"#), "{text}");
}

#[test]
fn fewshot_writes_subset_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    restaurant(tmp.path(), 60);
    let o = run(tmp.path(), &["fewshot", "--data", "data", "--k", "5", "--by", "category", "--seed", "42", "--out", "fs"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let summary = json(tmp.path().join("fs/fewshot.json"));
    let counts = summary[0]["counts"].as_object().unwrap();
    assert_eq!(counts.len(), 5);
    for c in counts.values() {
        assert!(c["selected"].as_u64() >= c["required"].as_u64());
    }
    let subset = fs::read_to_string(tmp.path().join("fs/train.jsonl")).unwrap();
    assert_eq!(subset.lines().count() as u64 - 1, summary[0]["prefix_len"].as_u64().unwrap());

    let manifest = json(tmp.path().join("fs/manifest.json"));
    assert_eq!(manifest["seeds"], serde_json::json!([42]));
    let outputs = manifest["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 2);
    for out in outputs {
        assert_eq!(out["sha256"].as_str().unwrap(), sha256(&tmp.path().join(out["path"].as_str().unwrap())));
    }
}

#[test]
fn emit_all_tasks_on_category_less_data_is_a_data_error() {
    let tmp = tempfile::tempdir().unwrap();
    laptop(tmp.path());
    let o = run(tmp.path(), &["emit", "--input", "lap.jsonl", "--mode", "it-mtl", "--tasks", "all", "--out", "x.jsonl"]);
    assert_eq!(code(&o), 1);
    let err = stderr(&o);
    assert!(err.contains("TASD") && err.contains("ASQP"), "{err}");
    assert!(!tmp.path().join("x.jsonl").exists());

    let o = run(tmp.path(), &["emit", "--input", "lap.jsonl", "--tasks", "applicable", "--seed", "1", "--out", "x.jsonl"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let header: Value = serde_json::from_str(fs::read_to_string(tmp.path().join("x.jsonl")).unwrap().lines().next().unwrap()).unwrap();
    assert_eq!(header["tasks"], serde_json::json!(["AE", "AESC", "ASTE"]));
    assert_eq!(header["records"], 6);
}

#[test]
fn emit_is_reproducible_from_its_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    restaurant(tmp.path(), 30);
    let args = ["emit", "--input", "data/train.jsonl", "--tasks", "all", "--seed", "7", "--out", "a.jsonl"];
    assert_eq!(code(&run(tmp.path(), &args)), 0);
    let manifest = json(tmp.path().join("a.manifest.json"));
    let digest = manifest["outputs"][0]["sha256"].as_str().unwrap().to_string();
    assert_eq!(manifest["inputs"][0]["sha256"].as_str().unwrap(), sha256(&tmp.path().join("data/train.jsonl")));

    let replay: Vec<String> = manifest["argv"].as_array().unwrap()[1..]
        .iter()
        .map(|v| v.as_str().unwrap().replace("a.jsonl", "b.jsonl"))
        .collect();
    let replay: Vec<&str> = replay.iter().map(String::as_str).collect();
    assert_eq!(code(&run(tmp.path(), &replay)), 0);
    assert_eq!(sha256(&tmp.path().join("b.jsonl")), digest);

    let other = ["emit", "--input", "data/train.jsonl", "--tasks", "all", "--seed", "8", "--out", "c.jsonl"];
    assert_eq!(code(&run(tmp.path(), &other)), 0);
    assert_ne!(sha256(&tmp.path().join("c.jsonl")), digest);
}

#[test]
fn per_epoch_emission_draws_fresh_templates() {
    let tmp = tempfile::tempdir().unwrap();
    restaurant(tmp.path(), 30);
    let o = run(tmp.path(), &["emit", "--input", "data/train.jsonl", "--seed", "7", "--per-epoch", "3", "--out", "t.jsonl"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let files: Vec<String> = (0..3).map(|e| fs::read_to_string(tmp.path().join(format!("t.epoch{e}.jsonl"))).unwrap()).collect();
    assert_ne!(files[0], files[1]);
    assert_eq!(json(tmp.path().join("t.manifest.json"))["outputs"].as_array().unwrap().len(), 3);
}

#[test]
fn malformed_input_reports_each_line() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("bad_train.txt"),
        "ok line####[([0], [1], 'POS')]\nx####[([9], [0], 'POS')]\nno separator\n",
    )
    .unwrap();
    let o = run(tmp.path(), &["import", "--input", "bad_train.txt", "--format", "aste", "--out", "bad.jsonl"]);
    assert_eq!(code(&o), 1);
    let err = stderr(&o);
    assert!(err.contains("line 2: token index 9 out of range"), "{err}");
    assert!(err.contains("line 3: malformed line"), "{err}");

    let o = run(tmp.path(), &["import", "--input", "bad_train.txt", "--format", "aste", "--out", "bad.jsonl", "--lenient"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stderr(&o).contains("skipped 2 malformed lines"));
}

#[test]
fn usage_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    laptop(tmp.path());
    for args in [
        vec!["emit", "--input", "lap.jsonl", "--out", "x.jsonl", "--tasks", "nope"],
        vec!["emit", "--out", "x.jsonl"],
        vec!["emit", "--input", "lap.jsonl", "--out", "x.jsonl", "--mode", "it", "--tasks", "ae,aesc"],
        vec!["eval", "--task", "asqp", "--gold", "lap.jsonl", "--pred", "p.jsonl", "--format", "html"],
        vec!["pipeline", "--data", ".", "--out", "g", "--k", "0"],
        vec!["frobnicate"],
        vec!["emit", "--seed", "not-a-number"],
    ] {
        let o = run(tmp.path(), &args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let tmp = tempfile::tempdir().unwrap();
    restaurant(tmp.path(), 20);
    fs::write(
        tmp.path().join("run.toml"),
        "[emit]\ninput = \"data/train.jsonl\"\nout = \"cfg.jsonl\"\ntasks = \"ae,aesc\"\nseed = 3\n",
    )
    .unwrap();
    let o = run(tmp.path(), &["--config", "run.toml", "emit", "--seed", "4"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let header: Value = serde_json::from_str(fs::read_to_string(tmp.path().join("cfg.jsonl")).unwrap().lines().next().unwrap()).unwrap();
    assert_eq!(header["seed"], 4);
    assert_eq!(header["tasks"], serde_json::json!(["AE", "AESC"]));

    fs::write(tmp.path().join("bad.toml"), "[emit]\nsede = 3\n").unwrap();
    assert_eq!(code(&run(tmp.path(), &["--config", "bad.toml", "emit"])), 2);
}

#[test]
fn inspect_agrees_with_the_imported_file() {
    let tmp = tempfile::tempdir().unwrap();
    restaurant(tmp.path(), 33);
    let o = run(tmp.path(), &["inspect", "data/train.jsonl", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let stats: Value = serde_json::from_slice(&o.stdout).unwrap();
    let s = &stats[0];
    assert_eq!(s["examples"], 33);
    assert_eq!(s["quads"], 33);
    assert_eq!(s["implicit_aspects"], 3);
    let cat_total: u64 = s["categories"].as_object().unwrap().values().map(|v| v.as_u64().unwrap()).sum();
    let sent_total: u64 = s["sentiments"].as_object().unwrap().values().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!((cat_total, sent_total), (33, 33));
    assert_eq!(s["applicable_tasks"].as_array().unwrap().len(), 5);
}

#[test]
fn parse_eval_report_chain() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    fs::write(dir.join("g_test.txt"), "The burger was good ####[['burger', 'FOOD#QUALITY', 'positive', 'good'], ['fries', 'FOOD#QUALITY', 'negative', 'cold']]\n").unwrap();
    assert_eq!(code(&run(dir, &["import", "--input", "g_test.txt", "--format", "quad", "--out", "gold.jsonl"])), 0);
    fs::write(
        dir.join("pred.jsonl"),
        concat!(
            r#"{"id":"test:1","task":"AE","generated":"burger [SSEP] burger"}"#, "\n",
            r#"{"id":"test:1","task":"ASQP","generated":"burger is good means food quality is great [SSEP] fries is cold means food is bad"}"#, "\n",
        ),
    )
    .unwrap();
    let o = run(dir, &["parse", "--pred", "pred.jsonl", "--gold", "gold.jsonl", "--out", "parsed.jsonl"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let lines: Vec<Value> = fs::read_to_string(dir.join("parsed.jsonl")).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["tuples"].as_array().unwrap().len(), 1);
    assert_eq!(lines[1]["malformed_count"], 1);
    assert_eq!(lines[1]["malformed"][0]["reason"], "unknown_category");

    let o = run(dir, &["eval", "--task", "ae", "--gold", "gold.jsonl", "--pred", "parsed.jsonl", "--format", "json", "--run", "demo", "--k", "5", "--out", "ae.eval.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((r["tp"].as_u64(), r["pred_count"].as_u64(), r["gold_count"].as_u64()), (Some(1), Some(1), Some(2)));
    assert_eq!(r["f1"]["ratio"], "2/3");
    assert_eq!(r["f1"]["value"], "0.6667");

    let o = run(dir, &["eval", "--task", "asqp", "--gold", "gold.jsonl", "--pred", "parsed.jsonl", "--run", "demo", "--k", "5", "--out", "asqp.eval.json"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("| ASQP | demo | 5 | 0.6667 |"));

    let o = run(dir, &["report", "."]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.starts_with("| Task | Model/Run | K | F1 |"));
    assert_eq!(table.lines().count(), 4, "{table}");

    fs::write(dir.join("stray.jsonl"), r#"{"id":"test:9","task":"AE","tuples":[],"malformed_count":0,"raw_segment_count":0}"#).unwrap();
    let o = run(dir, &["eval", "--task", "ae", "--gold", "gold.jsonl", "--pred", "stray.jsonl"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("test:9"));
}

#[test]
fn pipeline_grid_matches_the_experiment_shape() {
    let tmp = tempfile::tempdir().unwrap();
    restaurant(tmp.path(), 150);
    let o = run(tmp.path(), &["pipeline", "--data", "data", "--out", "grid", "--k", "5,10,20,50", "--seeds", "5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let grid = json(tmp.path().join("grid/grid.json"));
    let cells = grid.as_array().unwrap();
    assert_eq!(cells.len(), 20);
    let mut by_k: std::collections::BTreeMap<String, Vec<u64>> = Default::default();
    for c in cells {
        by_k.entry(c["k"].as_str().unwrap().to_string()).or_default().push(c["seed"].as_u64().unwrap());
        let dir = tmp.path().join(c["dir"].as_str().unwrap());
        let m = json(dir.join("manifest.json"));
        assert_eq!(m["seeds"], serde_json::json!([c["seed"]]));
        assert_eq!(c["train_records"].as_u64().unwrap(), 5 * c["train_examples"].as_u64().unwrap());
        assert_eq!(c["test_records"], 60);
    }
    assert_eq!(by_k.len(), 4);
    assert!(by_k.values().all(|seeds| *seeds == [0, 1, 2, 3, 4]));
    let top = json(tmp.path().join("grid/manifest.json"));
    assert_eq!(top["seeds"].as_array().unwrap().len(), 5);

    let sizes = |k: &str, seed: u64| json(tmp.path().join(format!("grid/k{k}/seed{seed}/fewshot.json")))[0]["prefix_len"].as_u64().unwrap();
    for seed in 0..5 {
        assert!(sizes("5", seed) <= sizes("10", seed) && sizes("10", seed) <= sizes("20", seed));
    }

    // Re-running reproduces every cell byte for byte.
    let before = fs::read(tmp.path().join("grid/k10/seed3/train.mtl.jsonl")).unwrap();
    let o = run(tmp.path(), &["pipeline", "--data", "data", "--out", "grid", "--k", "10", "--seeds", "5", "--jobs", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read(tmp.path().join("grid/k10/seed3/train.mtl.jsonl")).unwrap(), before);
}

#[test]
fn pipeline_scores_cells_with_predictions() {
    let tmp = tempfile::tempdir().unwrap();
    restaurant(tmp.path(), 40);
    let args = ["pipeline", "--data", "data", "--out", "g", "--k", "5", "--seeds", "1", "--tasks", "ae,asqp"];
    assert_eq!(code(&run(tmp.path(), &args)), 0);
    // Echo the gold targets back as predictions.
    let corpus = fs::read_to_string(tmp.path().join("g/k5/seed0/test.mtl.jsonl")).unwrap();
    let preds: String = corpus
        .lines()
        .skip(1)
        .map(|l| {
            let r: Value = serde_json::from_str(l).unwrap();
            serde_json::json!({"id": r["id"], "task": r["task"], "generated": r["target"]}).to_string() + "\n"
        })
        .collect();
    fs::write(tmp.path().join("g/k5/seed0/predictions.jsonl"), preds).unwrap();
    let o = run(tmp.path(), &args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for task in ["ae", "asqp"] {
        let r = json(tmp.path().join(format!("g/k5/seed0/{task}.eval.json")));
        assert_eq!(r["report"]["f1"]["value"], "1.0000", "{task}");
        assert_eq!(r["run"], "it-mtl");
    }
    let table = fs::read_to_string(tmp.path().join("g/report.md")).unwrap();
    assert!(table.contains("| AE | it-mtl | 5 | 1.0000 |"), "{table}");
}
