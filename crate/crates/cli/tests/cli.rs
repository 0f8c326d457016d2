//! End-to-end checks of the `topictrace` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use topictrace::io::{self as tio, write_raw};
use topictrace::report_dir::Manifest;
use topictrace::sample::{collection_sample, labeled_sample, write_sample, SAMPLE_COLLECTION, SAMPLE_SEED};
use topictrace::synth::{dated_assignments, planted_corpus, rng, PlantedSpec};
use topictrace_core::corpus::{Label, RawDocument};
use topictrace_core::time::{Day, Timestamp};

use rand::seq::SliceRandom;
use rand::Rng;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_topictrace")).current_dir(dir).args(args).output().expect("spawn");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn ok(dir: &Path, args: &[&str]) -> Run {
    let r = run(dir, args);
    assert_eq!(r.code, 0, "{args:?}\nstdout:\n{}\nstderr:\n{}", r.stdout, r.stderr);
    r
}

const RELEVANT: &[&str] = &["hospital", "nurse", "ventilator", "vaccine", "quarantine", "lockdown", "patients", "testing"];
const IRRELEVANT: &[&str] = &["pizza", "guitar", "football", "concert", "puppy", "sneakers", "recipe", "album"];

/// Two labels drawn from disjoint word lists.
fn separable(n: usize, seed: u64) -> Vec<RawDocument> {
    let mut r = rng(seed);
    (0..n)
        .map(|i| {
            let label = if i % 4 == 0 { Label::Irrelevant } else { Label::Relevant };
            let bank = if label == Label::Relevant { RELEVANT } else { IRRELEVANT };
            let words: Vec<&str> = (0..r.gen_range(4..8)).map(|_| *bank.choose(&mut r).unwrap()).collect();
            RawDocument {
                id: format!("d{i}"),
                text: words.join(" "),
                timestamp: Timestamp(1_580_000_000 + 3600 * i as i64),
                label: Some(label),
            }
        })
        .collect()
}

#[test]
fn help_lists_every_documented_flag() {
    let dir = tempfile::tempdir().unwrap();
    let r = ok(dir.path(), &["--help"]);
    for flag in ["--config", "--seed", "--out", "--threads"] {
        assert!(r.stdout.contains(flag), "missing {flag}");
    }
    for cmd in ["preprocess", "train", "cv", "predict", "topics", "sweep", "trends", "report", "pipeline"] {
        assert!(r.stdout.contains(cmd), "missing {cmd}");
    }
    let r = ok(dir.path(), &["train", "--help"]);
    for flag in ["--model", "--features", "--embeddings", "--smote-ratio", "--smote-k"] {
        assert!(r.stdout.contains(flag), "missing {flag}");
    }
    assert!(ok(dir.path(), &["cv", "--help"]).stdout.contains("--folds"));
    assert!(ok(dir.path(), &["predict", "--help"]).stdout.contains("--model-file"));
}

#[test]
fn usage_and_config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["--bogus", "preprocess"]).code, 1);
    assert_eq!(run(dir.path(), &["preprocess"]).code, 1);
    fs::write(dir.path().join("bad.toml"), "seeed = 3\n").unwrap();
    let r = run(dir.path(), &["--config", "bad.toml", "preprocess"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("seeed"), "{}", r.stderr);
}

#[test]
fn missing_input_exits_2_and_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(dir.path(), &["--corpus", "nowhere/posts.jsonl", "preprocess"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("nowhere/posts.jsonl"), "{}", r.stderr);
}

#[test]
fn malformed_record_reports_its_line() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.jsonl"), "{\"id\":\"a\",\"text\":\"hi there\",\"ts\":\"2020-01-01T00:00:00Z\"}\n{\"id\":\"b\",\"text\":\"x\"}\n").unwrap();
    let r = run(dir.path(), &["--corpus", "c.jsonl", "preprocess"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 2"), "{}", r.stderr);
}

#[test]
fn preprocess_counts_duplicates_as_dropped() {
    let dir = tempfile::tempdir().unwrap();
    let mut docs = separable(200, 1);
    // unique texts, then every tenth repeated under a new id
    for (i, d) in docs.iter_mut().enumerate() {
        d.text = format!("{} item{i}", d.text);
    }
    let extra: Vec<RawDocument> = docs
        .iter()
        .step_by(10)
        .enumerate()
        .map(|(j, d)| RawDocument { id: format!("dup{j}"), ..d.clone() })
        .collect();
    docs.extend(extra);
    write_raw(&dir.path().join("c.jsonl"), &docs).unwrap();
    ok(dir.path(), &["--corpus", "c.jsonl", "--out", "o", "preprocess"]);
    let stats: serde_json::Value = tio::read_json(&dir.path().join("o/preprocess_stats.json")).unwrap();
    let c = &stats["corpus"];
    assert_eq!(c["total"], 220);
    assert_eq!(c["duplicates"], 20);
    assert_eq!(c["empty"], 0);
    assert_eq!(c["unique"], 200);
}

#[test]
fn bundled_labeled_sample_keeps_the_label_split() {
    let dir = tempfile::tempdir().unwrap();
    write_raw(&dir.path().join("l.jsonl"), &labeled_sample(1)).unwrap();
    let r = ok(dir.path(), &["--labeled", "l.jsonl", "--out", "o", "preprocess"]);
    assert!(r.stdout.contains("1154 relevant, 346 irrelevant"), "{}", r.stdout);
}

fn separable_setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let docs = separable(240, 2);
    write_raw(&dir.path().join("l.jsonl"), &docs).unwrap();
    let unlabeled: Vec<RawDocument> = docs.iter().map(|d| RawDocument { label: None, ..d.clone() }).collect();
    write_raw(&dir.path().join("c.jsonl"), &unlabeled).unwrap();
    ok(dir.path(), &["--labeled", "l.jsonl", "--corpus", "c.jsonl", "--out", "o", "preprocess"]);
    dir
}

#[test]
fn train_then_predict_on_separable_corpus_is_perfect() {
    let dir = separable_setup();
    for model in ["logreg", "svm"] {
        ok(dir.path(), &["--out", "o", "train", "--model", model]);
        let m: serde_json::Value = tio::read_json(&dir.path().join("o/metrics.json")).unwrap();
        assert_eq!(m["train"]["accuracy"], 1.0, "{model}");
        assert_eq!(m["test"]["accuracy"], 1.0, "{model}");
        ok(dir.path(), &["--out", "o", "predict"]);
        let labels = fs::read_to_string(dir.path().join("o/predictions.csv")).unwrap();
        let clean = tio::read_clean(&dir.path().join("o/labeled.clean.jsonl")).unwrap();
        let truth: std::collections::BTreeMap<String, Label> =
            clean.iter().map(|d| (d.id.clone(), d.label.unwrap())).collect();
        let mut rows = 0;
        for line in labels.lines().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            assert_eq!(Label::parse(f[1]), Some(truth[f[0]]), "{model}: {line}");
            rows += 1;
        }
        assert_eq!(rows, truth.len());
        let relevant = tio::read_clean(&dir.path().join("o/relevant.clean.jsonl")).unwrap();
        assert_eq!(relevant.len(), truth.values().filter(|l| **l == Label::Relevant).count());
    }
}

#[test]
fn predict_refuses_a_foreign_vocabulary() {
    let dir = separable_setup();
    ok(dir.path(), &["--out", "o", "train"]);
    let path = dir.path().join("o/vocab.json");
    let mut vocab: serde_json::Value = tio::read_json(&path).unwrap();
    let df = vocab["doc_freq"][0].as_u64().unwrap();
    vocab["doc_freq"][0] = (df + 1).into();
    tio::write_json(&path, &vocab).unwrap();
    let r = run(dir.path(), &["--out", "o", "predict"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("fingerprint"), "{}", r.stderr);
    assert!(!dir.path().join("o/predictions.csv").exists());
}

#[test]
fn cv_reports_every_fold_with_mean_and_std() {
    let dir = tempfile::tempdir().unwrap();
    write_raw(&dir.path().join("l.jsonl"), &labeled_sample(4)).unwrap();
    ok(dir.path(), &["--labeled", "l.jsonl", "--out", "o", "preprocess"]);
    ok(dir.path(), &["--out", "o", "cv", "--folds", "5", "--model", "logreg"]);
    let cv: serde_json::Value = tio::read_json(&dir.path().join("o/cv.json")).unwrap();
    let folds = cv["folds"].as_array().unwrap();
    assert_eq!(folds.len(), 5);
    let total: u64 = folds.iter().flat_map(|f| f["confusion"].as_array().unwrap().iter().flat_map(|r| r.as_array().unwrap().clone())).map(|c| c.as_u64().unwrap()).sum();
    assert_eq!(total, 1500);
    assert!(cv["mean"]["accuracy"].as_f64().unwrap() > 0.9);
    assert!(cv["std"]["f1"].as_f64().unwrap() >= 0.0);
}

#[test]
fn embedding_features_train_and_predict() {
    let dir = tempfile::tempdir().unwrap();
    let docs = separable(160, 3);
    write_raw(&dir.path().join("l.jsonl"), &docs).unwrap();
    let mut r = rng(9);
    let mut emb = String::from("dim=6\n");
    for d in &docs {
        let shift = if d.label == Some(Label::Relevant) { 3.0 } else { -3.0 };
        let v: Vec<String> = (0..6).map(|j| format!("{:.5}", if j < 2 { shift } else { 0.0 } + r.gen_range(-1.0..1.0))).collect();
        emb.push_str(&format!("{}\t{}\n", d.id, v.join(" ")));
    }
    fs::write(dir.path().join("e.txt"), emb).unwrap();
    let unlabeled: Vec<RawDocument> = docs.iter().map(|d| RawDocument { label: None, ..d.clone() }).collect();
    write_raw(&dir.path().join("c.jsonl"), &unlabeled).unwrap();
    let common = ["--labeled", "l.jsonl", "--corpus", "c.jsonl", "--embeddings", "e.txt", "--out", "o"];
    ok(dir.path(), &[&common[..], &["preprocess"]].concat());
    ok(dir.path(), &[&common[..], &["train", "--features", "embeddings"]].concat());
    assert!(dir.path().join("o/pca.json").exists());
    let m: serde_json::Value = tio::read_json(&dir.path().join("o/metrics.json")).unwrap();
    assert!(m["test"]["accuracy"].as_f64().unwrap() >= 0.95);
    ok(dir.path(), &[&common[..], &["predict"]].concat());
    let summary: serde_json::Value = tio::read_json(&dir.path().join("o/label_summary.json")).unwrap();
    assert_eq!(summary["n_relevant"].as_u64().unwrap() + summary["n_irrelevant"].as_u64().unwrap(), 160);
}

#[test]
fn sweep_on_planted_corpus_writes_one_row_per_k() {
    let dir = tempfile::tempdir().unwrap();
    let planted = planted_corpus(&PlantedSpec::default(), 17);
    tio::write_clean(&dir.path().join("o/corpus.clean.jsonl"), &planted.docs).unwrap();
    fs::write(dir.path().join("run.toml"), "out = \"o\"\n[lda]\nmin_df = 1\nmax_df_ratio = 1.0\n").unwrap();
    ok(dir.path(), &["--config", "run.toml", "sweep", "--k-min", "2", "--k-max", "8"]);
    let csv = fs::read_to_string(dir.path().join("o/coherence.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "K,mean_coherence");
    assert_eq!(lines.len(), 8);
    let sweep: serde_json::Value = tio::read_json(&dir.path().join("o/sweep.json")).unwrap();
    let k = sweep["selected"].as_u64().unwrap();
    assert!((3..=5).contains(&k), "selected {k}");
}

fn write_doc_topics(path: &Path, k: usize, rows: &[(String, Timestamp, usize)]) {
    let mut s = String::from("id,ts,dominant");
    for t in 0..k {
        s.push_str(&format!(",theta_{t}"));
    }
    s.push('\n');
    for (id, ts, dom) in rows {
        s.push_str(&format!("{id},{},{dom}", tio::format_timestamp(*ts)));
        for t in 0..k {
            s.push_str(if t == *dom { ",0.9" } else { "," });
            if t != *dom {
                s.push_str(&format!("{}", 0.1 / (k - 1) as f64));
            }
        }
        s.push('\n');
    }
    fs::write(path, s).unwrap();
}

#[test]
fn trend_rows_sum_to_100() {
    let dir = tempfile::tempdir().unwrap();
    let origin = Day::from_ymd(2020, 1, 1);
    let docs = dated_assignments(900, 12, 5, origin, 21);
    fs::create_dir_all(dir.path().join("o")).unwrap();
    let rows: Vec<_> = docs.iter().map(|(d, t)| (d.id.clone(), d.timestamp, *t)).collect();
    write_doc_topics(&dir.path().join("o/doc_topics.csv"), 5, &rows);
    ok(dir.path(), &["--out", "o", "trends", "--origin", "2020-01-01"]);
    let csv = fs::read_to_string(dir.path().join("o/trend.csv")).unwrap();
    let mut nonempty = 0;
    for line in csv.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').skip(1).collect();
        if cells.iter().all(|c| c.is_empty()) {
            continue;
        }
        let sum: f64 = cells.iter().map(|c| c.parse::<f64>().unwrap()).sum();
        // one-decimal rounding can move the sum by at most 0.05 per topic
        assert!((sum - 100.0).abs() <= 0.05 * 5.0 + 1e-9, "{line}");
        nonempty += 1;
    }
    assert!(nonempty >= 10);
    let trend: serde_json::Value = tio::read_json(&dir.path().join("o/trend.json")).unwrap();
    for row in trend["matrix"]["values"].as_array().unwrap().iter().filter(|r| !r.is_null()) {
        let s: f64 = row.as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).sum();
        assert!((s - 100.0).abs() < 1e-6);
    }
}

#[test]
fn documents_before_the_origin_are_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir_all(dir.path().join("o")).unwrap();
    let rows = vec![("a".to_string(), Day::from_ymd(2019, 12, 30).start(), 0), ("b".to_string(), Day::from_ymd(2020, 1, 3).start(), 1)];
    write_doc_topics(&dir.path().join("o/doc_topics.csv"), 2, &rows);
    let r = run(dir.path(), &["--out", "o", "trends"]);
    assert_eq!(r.code, 2, "{}", r.stderr);
}

#[test]
fn lda_only_run_marks_classifier_artifacts_missing() {
    let dir = tempfile::tempdir().unwrap();
    write_raw(&dir.path().join("c.jsonl"), &collection_sample(800, 5)).unwrap();
    fs::write(
        dir.path().join("run.toml"),
        "out = \"o\"\n[paths]\ncorpus = \"c.jsonl\"\n[lda]\nk = 4\niterations = 200\nburn_in = 100\n",
    )
    .unwrap();
    ok(dir.path(), &["--config", "run.toml", "pipeline"]);
    let manifest: Manifest = tio::read_json(&dir.path().join("o/report/manifest.json")).unwrap();
    let missing: Vec<&str> = manifest.missing.iter().flat_map(|m| m.artifacts.iter().map(String::as_str)).collect();
    assert!(missing.contains(&"labels.csv"));
    assert!(missing.contains(&"metrics.json"));
    assert!(missing.contains(&"coherence.csv"));
    let names: Vec<&str> = manifest.artifacts.iter().map(|a| a.name.as_str()).collect();
    for n in ["topics", "trend", "trend_chart", "topic_map"] {
        assert!(names.contains(&n), "missing {n}: {names:?}");
    }
    for a in &manifest.artifacts {
        let bytes = fs::read(dir.path().join("o/report").join(&a.path)).unwrap();
        assert_eq!(bytes.len() as u64, a.bytes);
        assert_eq!(topictrace::report_dir::sha256_hex(&bytes), a.sha256);
    }
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    write_raw(&dir.path().join("l.jsonl"), &separable(120, 6)).unwrap();
    fs::write(dir.path().join("run.toml"), "seed = 1\nout = \"from_config\"\n[paths]\nlabeled = \"l.jsonl\"\n").unwrap();
    ok(dir.path(), &["--config", "run.toml", "--out", "from_flag", "preprocess"]);
    assert!(dir.path().join("from_flag/labeled.clean.jsonl").exists());
    assert!(!dir.path().join("from_config").exists());
}

#[test]
fn stages_are_idempotent() {
    let dir = separable_setup();
    ok(dir.path(), &["--out", "o", "train"]);
    let first = fs::read(dir.path().join("o/model.json")).unwrap();
    ok(dir.path(), &["--out", "o", "train"]);
    assert_eq!(first, fs::read(dir.path().join("o/model.json")).unwrap());
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

#[test]
fn bundled_sample_matches_the_generator() {
    let dir = tempfile::tempdir().unwrap();
    write_sample(dir.path(), SAMPLE_SEED, SAMPLE_COLLECTION).unwrap();
    for f in ["labeled.jsonl", "corpus.jsonl", "timeline.json", "config.toml"] {
        let bundled = fs::read(repo_root().join("data/sample").join(f)).unwrap();
        assert!(bundled == fs::read(dir.path().join(f)).unwrap(), "data/sample/{f} is stale; rerun generate-sample");
    }
}
