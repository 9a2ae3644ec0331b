use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_simsmooth"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const TOY: &str = "\
dog\tbark
dog\tbark
dog\tbite
cat\tbite
cat\tmeow
";

/// Block-structured counts: 40 nouns and 24 verbs in 4 classes. Dense within
/// a class and sparse across, so the split leaves plenty of unseen test pairs.
fn block_corpus() -> String {
    let mut s = String::new();
    for i in 0..40u64 {
        for j in 0..24u64 {
            let count = if i % 4 == j % 4 {
                1 + (i * 7 + j * 3) % 4
            } else if (i * 5 + j * 11) % 9 == 0 {
                1
            } else {
                0
            };
            if count > 0 {
                let _ = writeln!(s, "n{i}\tv{j}\t{count}");
            }
        }
    }
    s
}

#[test]
fn ingest_reports_totals() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "toy.tsv", TOY);
    let snap = dir.path().join("toy.json");
    let o = run(&["ingest", "--input", s(&input), "--format", "json", "--out", s(&snap)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["total_pairs"], 5);
    assert_eq!(v["nouns"], 2);
    assert_eq!(v["verbs"], 3);
    assert_eq!(v["singletons"], 3);

    // the snapshot reads back as the same corpus
    let again = run(&["ingest", "--input", s(&snap), "--format", "json"]);
    assert_eq!(code(&again), 0);
    assert_eq!(stdout(&again), stdout(&o));
}

#[test]
fn missing_input_is_an_io_error() {
    let o = run(&["ingest", "--input", "/nonexistent/pairs.tsv"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn malformed_input_is_an_io_error() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "bad.tsv", "dog\tbark\tmany\n");
    assert_eq!(code(&run(&["ingest", "--input", s(&input)])), 2);
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(code(&run(&["ingest"])), 3);
    assert_eq!(code(&run(&["frobnicate"])), 3);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn neighbors_rank_self_first_under_avg() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "block.tsv", &block_corpus());
    let o = run(&[
        "neighbors",
        "--input",
        s(&input),
        "--word",
        "n0",
        "--measures",
        "AVG,L1",
        "-n",
        "3",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("measure\trank\tword\traw\tweight"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(&rows[0][..4], &["AVG", "1", "n0", "0"]);
    assert_eq!(&rows[3][..4], &["L1", "1", "n0", "0"]);
    // nearest neighbors other than itself share its class
    for r in rows.iter().filter(|r| r[2] != "n0") {
        let id: usize = r[2][1..].parse().unwrap();
        assert_eq!(id % 4, 0, "{r:?}");
    }
}

#[test]
fn neighbors_clamp_to_vocabulary() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "toy.tsv", TOY);
    let o = run(&[
        "neighbors",
        "--input",
        s(&input),
        "--word",
        "dog",
        "--measures",
        "CONFUSION",
        "-n",
        "50",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 1 + 2);
}

#[test]
fn neighbors_of_unknown_word_fail() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "toy.tsv", TOY);
    let o = run(&["neighbors", "--input", s(&input), "--word", "cow", "--measures", "AVG"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn prob_reports_each_estimate() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "block.tsv", &block_corpus());
    let o = run(&[
        "prob",
        "--input",
        s(&input),
        "--noun",
        "n0",
        "--verb",
        "v1",
        "--format",
        "json",
        "--gamma",
        "0.5",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["count"], 0);
    assert_eq!(v["mle"], 0.0);
    let p_sim = v["p_sim"].as_f64().unwrap();
    assert!(p_sim > 0.0 && p_sim < 1.0);
    assert!(v["p_r"].as_f64().unwrap() > 0.0);

    let seen = run(&[
        "prob",
        "--input",
        s(&input),
        "--noun",
        "n0",
        "--verb",
        "v0",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&seen)).unwrap();
    assert_eq!(v["count"], 1);
    // n0 has eight pair types, each seen once
    assert_eq!(v["mle"], 0.125);

    let o = run(&["prob", "--input", s(&input), "--noun", "n0", "--verb", "nope"]);
    assert_eq!(code(&o), 3);
}

fn evaluate(dir: &TempDir, extra: &[&str]) -> Output {
    let input = dir.path().join("block.tsv");
    if !input.exists() {
        std::fs::write(&input, block_corpus()).unwrap();
    }
    // the toy counts admit no Good-Turing cutoff, so stay with the MLE base models
    let mut args = vec!["evaluate", "--input", s(&input), "--models", "MLE-1,MLE-o1"];
    args.extend_from_slice(extra);
    bin().args(&args).output().unwrap()
}

#[test]
fn evaluate_mle_is_at_chance() {
    let dir = TempDir::new().unwrap();
    let o = evaluate(&dir, &["--methods", "MLE", "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let folds = v["folds"].as_array().unwrap();
    assert_eq!(folds.len(), 10);
    for f in folds {
        assert!(f["n"].as_u64().unwrap() > 0);
        assert_eq!(f["error_rate"], 0.5);
    }
}

#[test]
fn empty_grid_with_tunable_method_is_rejected_before_reading_input() {
    let o = run(&[
        "evaluate",
        "--input",
        "/nonexistent/pairs.tsv",
        "--methods",
        "AVG",
        "--beta-grid",
        "",
    ]);
    assert_eq!(code(&o), 3);
    let o = run(&["evaluate", "--input", "/nonexistent/pairs.tsv", "--gamma", "2"]);
    assert_eq!(code(&o), 3);
}

const EVAL_ARGS: &[&str] = &[
    "--methods",
    "MLE,RAND,AVG,L1,CONFUSION",
    "--beta-grid",
    "1:1:6",
    "--seed",
    "3",
];

#[test]
fn evaluate_is_deterministic_across_jobs() {
    let dir = TempDir::new().unwrap();
    let mut outputs = Vec::new();
    for jobs in ["1", "4", "1"] {
        let mut args = EVAL_ARGS.to_vec();
        args.extend_from_slice(&["--jobs", jobs]);
        let o = evaluate(&dir, &args);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(o.stdout);
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn report_config_reproduces_the_run() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("report.json");
    let mut args = EVAL_ARGS.to_vec();
    args.extend_from_slice(&["--out", s(&out)]);
    let first = evaluate(&dir, &args);
    assert_eq!(code(&first), 0, "{}", String::from_utf8_lossy(&first.stderr));
    assert!(first.stdout.is_empty());
    let report = std::fs::read_to_string(&out).unwrap();
    assert!(report.contains("\"simsmooth-report\""));

    let rerun = dir.path().join("rerun.json");
    let o = run(&["evaluate", "--config", s(&out), "--out", s(&rerun), "--jobs", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(&rerun).unwrap(), report);
}

#[test]
fn toml_config_and_flag_override() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "block.tsv", &block_corpus());
    let cfg = write(
        &dir,
        "run.toml",
        &format!(
            "input = {:?}\nmodels = [\"MLE-1\"]\nmethods = [\"MLE\"]\nfolds = 4\nseed = 1\n",
            s(&input)
        ),
    );
    let o = run(&["evaluate", "--config", s(&cfg), "--folds", "3", "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["folds"], 3);
    assert_eq!(v["folds"].as_array().unwrap().len(), 3);

    let bad = write(&dir, "bad.toml", "colour = 1\n");
    assert_eq!(code(&run(&["evaluate", "--config", s(&bad)])), 3);
}

#[test]
fn tsv_report_has_fold_table() {
    let dir = TempDir::new().unwrap();
    let o = evaluate(&dir, &["--methods", "MLE,AVG", "--beta-grid", "1,2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("# format\tsimsmooth-report\n"), "{text}");
    let rows = text
        .lines()
        .filter(|l| l.starts_with("MLE-1\t") || l.starts_with("MLE-o1\t"))
        .count();
    assert_eq!(rows, 20);
}
