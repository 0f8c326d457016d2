//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! with its timing, and exits nonzero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use topictrace::synth::{dated_assignments, gaussian_blobs, planted_corpus, rng, PlantedSpec};
use topictrace_core::balance::{knn_indices, smote};
use topictrace_core::classify::{
    cross_validate, logreg_loss_and_grad, oversample, split, SmoteParams, SplitSpec, TrainParams,
};
use topictrace_core::corpus::{stem, CleanDocument, Label};
use topictrace_core::features::{build_vocabulary, tfidf_vectorize, FeatureKind};
use topictrace_core::linalg::SymMatrix;
use topictrace_core::report::{classical_mds, js_divergence};
use topictrace_core::rng::Rng;
use topictrace_core::time::{Day, Timestamp};
use topictrace_core::topics::{encode_corpus, lda_fit, LdaParams, LdaSampler};
use topictrace_core::trends::{assign_weeks, topic_trend};

use rand::Rng as _;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn data_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/data"))
}

fn repo_root() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../.."))
}

// 1
fn porter() -> Check {
    let voc = fs::read_to_string(data_dir().join("porter_voc.txt")).map_err(|e| e.to_string())?;
    let out = fs::read_to_string(data_dir().join("porter_output.txt")).map_err(|e| e.to_string())?;
    let pairs: Vec<(&str, &str)> = voc.lines().zip(out.lines()).collect();
    ensure(voc.lines().count() == out.lines().count(), || "vocabulary and output lengths differ".into())?;
    let bad: Vec<_> = pairs.iter().filter(|(w, s)| stem(w) != *s).take(5).collect();
    ensure(bad.is_empty(), || format!("mismatches, first: {bad:?}"))?;
    Ok(format!("{}/{} reference words agree", pairs.len(), pairs.len()))
}

// 2
fn split_arithmetic() -> Check {
    let mut labels: Vec<Label> =
        std::iter::repeat_n(Label::Relevant, 1154).chain(std::iter::repeat_n(Label::Irrelevant, 346)).collect();
    Rng::new(5).shuffle(&mut labels);
    let mut detail = String::new();
    for seed in 0..20 {
        let s = split(&labels, &SplitSpec::new(seed)).map_err(|e| e.to_string())?;
        let sizes = (s.train.len(), s.test.len(), s.validation.len());
        ensure(sizes == (1125, 225, 150), || format!("seed {seed}: sizes {sizes:?}"))?;
        for (name, part) in [("train", &s.train), ("test", &s.test), ("validation", &s.validation)] {
            let rel = part.iter().filter(|&&i| labels[i] == Label::Relevant).count() as f64;
            let want = part.len() as f64 * 1154.0 / 1500.0;
            ensure((rel - want).abs() <= 1.0, || format!("seed {seed} {name}: {rel} relevant, expected {want:.2}"))?;
            if seed == 0 {
                detail.push_str(&format!(" {name} {}/{}", rel, part.len() as f64 - rel));
            }
        }
    }
    Ok(format!("1125/225/150 for 20 seeds; class split{detail}"))
}

// 3
fn gradient_check() -> Check {
    let h = 1e-5;
    let mut rng = Rng::new(31);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let n = 30 + rng.below(50);
        let d = 2 + rng.below(8);
        let x: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.uniform() * 4.0 - 2.0).collect()).collect();
        let y: Vec<Label> = (0..n).map(|_| Label::from_index(rng.below(2))).collect();
        let l2 = rng.uniform() * 0.1;
        for _ in 0..10 {
            let w: Vec<f64> = (0..d).map(|_| rng.uniform() * 2.0 - 1.0).collect();
            let b = rng.uniform() - 0.5;
            let (_, gw, gb) = logreg_loss_and_grad(&x, &y, &w, b, l2);
            let f = |w: &[f64], b: f64| logreg_loss_and_grad(&x, &y, w, b, l2).0;
            let mut analytic = gw.clone();
            analytic.push(gb);
            let mut numeric = Vec::with_capacity(d + 1);
            for j in 0..d {
                let (mut wp, mut wm) = (w.clone(), w.clone());
                wp[j] += h;
                wm[j] -= h;
                numeric.push((f(&wp, b) - f(&wm, b)) / (2.0 * h));
            }
            numeric.push((f(&w, b + h) - f(&w, b - h)) / (2.0 * h));
            for (a, n) in analytic.iter().zip(&numeric) {
                worst = worst.max((a - n).abs() / a.abs().max(n.abs()).max(1e-8));
            }
        }
    }
    ensure(worst < 1e-4, || format!("max relative error {worst:.2e}"))?;
    Ok(format!("100 points over 10 datasets, max relative error {worst:.2e}"))
}

// 4
fn classifier_sanity() -> Check {
    let mut detail = Vec::new();
    let runs = [("balanced", 500, 500, false), ("77/23 + SMOTE", 770, 230, true)];
    for (name, n_rel, n_irr, smote_on) in runs {
        let (x, y) = gaussian_blobs(n_rel, n_irr, 4.0, 8);
        let smote_params = SmoteParams { enabled: smote_on, ..SmoteParams::default() };
        for (model, params) in
            [("LR", TrainParams::logistic(FeatureKind::EmbeddingPca, 1)), ("SVM", TrainParams::svm(FeatureKind::EmbeddingPca, 1))]
        {
            let cv = cross_validate(&x, &y, &params, &smote_params, 5, 3).map_err(|e| e.to_string())?;
            let min = cv.folds.iter().map(|f| f.accuracy).fold(1.0, f64::min);
            ensure(cv.mean.accuracy >= 0.95, || format!("{name} {model}: mean accuracy {:.4}", cv.mean.accuracy))?;
            if smote_on {
                ensure(cv.synthetic_per_fold.iter().all(|&s| s > 0), || format!("{name} {model}: SMOTE added nothing"))?;
            }
            detail.push(format!("{name} {model} {:.3} (min fold {:.3})", cv.mean.accuracy, min));
        }
    }
    Ok(format!("5-fold held-out accuracy: {}", detail.join(", ")))
}

// 5
fn smote_properties() -> Check {
    let mut r = rng(44);
    let minority: Vec<Vec<f64>> = (0..37).map(|_| (0..4).map(|_| r.gen_range(-3.0..3.0)).collect()).collect();
    let k = 5;
    for target in [37, 38, 74, 111, 500] {
        let out = smote(&minority, target, k, 9).map_err(|e| e.to_string())?;
        ensure(out.synthetic.len() == target - 37, || format!("target {target}: {} synthetic", out.synthetic.len()))?;
    }
    let out = smote(&minority, 400, k, 9).map_err(|e| e.to_string())?;
    for (s, p) in out.synthetic.iter().enumerate() {
        let base = s % minority.len();
        let nn = knn_indices(&minority, base, k).map_err(|e| e.to_string())?;
        let inside = nn.iter().any(|&j| {
            p.iter().zip(&minority[base]).zip(&minority[j]).all(|((x, a), b)| *x >= a.min(*b) && *x <= a.max(*b))
        });
        ensure(inside, || format!("synthetic {s} is outside its generating pair's box"))?;
    }
    let bytes = || -> Result<Vec<u8>, String> {
        let (mut x, mut y): (Vec<Vec<f64>>, Vec<Label>) = gaussian_blobs(300, 60, 3.0, 2);
        let added = oversample(&mut x, &mut y, &SmoteParams::default(), 77).map_err(|e| e.to_string())?;
        ensure(added == 240, || format!("oversample added {added}, expected 240"))?;
        Ok(x.iter().flatten().flat_map(|v| v.to_le_bytes()).collect())
    };
    ensure(bytes()? == bytes()?, || "two runs differ".into())?;
    Ok("exact counts for 5 targets; 363 points inside pair boxes; byte-identical reruns".into())
}

// 6
fn tfidf_oracle() -> Check {
    let mut rng = Rng::new(2024);
    let mut corpora = 0;
    let mut worst: f64 = 0.0;
    while corpora < 100 {
        let n_docs = 2 + rng.below(12);
        let n_terms = 3 + rng.below(15);
        let docs: Vec<CleanDocument> = (0..n_docs)
            .map(|i| {
                let tokens = (0..1 + rng.below(12)).map(|_| format!("w{}", rng.below(n_terms))).collect();
                CleanDocument { id: i.to_string(), tokens, timestamp: Timestamp(0), label: None }
            })
            .collect();
        let (min_df, max_df) = (1 + rng.below(2), [0.5, 0.8, 1.0][rng.below(3)]);
        let Ok(vocab) = build_vocabulary(&docs, min_df, max_df) else { continue };
        corpora += 1;
        let n = n_docs as f64;
        let all: BTreeSet<&String> = docs.iter().flat_map(|d| &d.tokens).collect();
        for d in &docs {
            let mut want: Vec<(&String, f64)> = Vec::new();
            for t in &all {
                let df = docs.iter().filter(|e| e.tokens.contains(t)).count();
                let tf = d.tokens.iter().filter(|x| x == t).count();
                if df >= min_df && df as f64 <= max_df * n && tf > 0 {
                    want.push((t, tf as f64 * (((1.0 + n) / (1.0 + df as f64)).ln() + 1.0)));
                }
            }
            let norm = want.iter().map(|w| w.1 * w.1).sum::<f64>().sqrt();
            let got = tfidf_vectorize(&d.tokens, &vocab);
            ensure(got.nnz() == want.len(), || "support differs".into())?;
            for (t, w) in want {
                let idx = vocab.index_of(t).ok_or("term missing from vocabulary")?;
                worst = worst.max((got.get(idx) - w / norm).abs());
            }
        }
    }
    ensure(worst <= 1e-12, || format!("max abs difference {worst:.2e}"))?;
    Ok(format!("100 random corpora, max abs difference {worst:.1e}"))
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    dot / (a.iter().map(|x| x * x).sum::<f64>().sqrt() * b.iter().map(|x| x * x).sum::<f64>().sqrt())
}

// 7
fn lda_recovery() -> Check {
    let planted = planted_corpus(&PlantedSpec::default(), 17);
    let vocab = build_vocabulary(&planted.docs, 1, 1.0).map_err(|e| e.to_string())?;
    let docs = encode_corpus(&planted.docs, &vocab);
    let params = LdaParams::new(4, 99);

    let mut sampler = LdaSampler::new(&docs, vocab.len(), 4, params.alpha(), params.beta, params.seed).map_err(|e| e.to_string())?;
    sampler.check_counts().map_err(|e| format!("initial state: {e}"))?;
    for it in 0..params.iterations {
        sampler.sweep();
        sampler.check_counts().map_err(|e| format!("after sweep {}: {e}", it + 1))?;
    }

    let (model, _) = lda_fit(&docs, &vocab, &params).map_err(|e| e.to_string())?;
    // planted phi in vocabulary order
    let truth: Vec<Vec<f64>> = planted
        .phi
        .iter()
        .map(|row| (0..vocab.len()).map(|w| row[planted.terms.iter().position(|t| t == vocab.term(w)).unwrap()]).collect())
        .collect();
    let best: Vec<f64> = truth
        .iter()
        .map(|t| (0..model.k).map(|k| cosine(t, model.phi_row(k))).fold(f64::MIN, f64::max))
        .collect();
    let mean = best.iter().sum::<f64>() / best.len() as f64;
    ensure(mean >= 0.9, || format!("mean best-match cosine {mean:.4}"))?;
    Ok(format!("mean best-match cosine {mean:.4}; counts conserved over {} sweeps", params.iterations))
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_topictrace"))
}

// 8
fn coherence_sweep() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let planted = planted_corpus(&PlantedSpec::default(), 17);
    topictrace::io::write_clean(&dir.path().join("o/corpus.clean.jsonl"), &planted.docs).map_err(|e| e.to_string())?;
    fs::write(dir.path().join("run.toml"), "out = \"o\"\n[lda]\nk_min = 2\nk_max = 8\ncoherence = \"umass\"\nmin_df = 1\nmax_df_ratio = 1.0\n")
        .map_err(|e| e.to_string())?;
    let out = bin().current_dir(dir.path()).args(["--config", "run.toml", "sweep"]).output().map_err(|e| e.to_string())?;
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    let csv = fs::read_to_string(dir.path().join("o/coherence.csv")).map_err(|e| e.to_string())?;
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    ensure(rows.len() == 7, || format!("{} curve rows", rows.len()))?;
    let ks: Vec<&str> = rows.iter().map(|r| r.split(',').next().unwrap_or("")).collect();
    ensure(ks == ["2", "3", "4", "5", "6", "7", "8"], || format!("K column {ks:?}"))?;
    let sweep: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("o/sweep.json")).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let k = sweep["selected"].as_u64().ok_or("no K selected")?;
    ensure((3..=5).contains(&k), || format!("selected K={k}"))?;
    Ok(format!("UMass selected K={k}; curve has 7 rows"))
}

// 9
fn trend_oracle() -> Check {
    let origin = Day::from_ymd(2020, 1, 1);
    let docs = dated_assignments(3000, 17, 8, origin, 21);
    let clean: Vec<CleanDocument> = docs.iter().map(|d| d.0.clone()).collect();
    let dominant: Vec<usize> = docs.iter().map(|d| d.1).collect();
    let weeks = assign_weeks(&clean, origin).map_err(|e| e.to_string())?;
    let trend = topic_trend(&dominant, &weeks, 8, origin).map_err(|e| e.to_string())?;
    let mut tally: BTreeMap<i64, [u64; 8]> = BTreeMap::new();
    for (d, t) in &docs {
        tally.entry((d.timestamp.0 - origin.start().0).div_euclid(604_800)).or_insert([0; 8])[*t] += 1;
    }
    let mut rows = 0;
    for (w, row) in trend.values.iter().enumerate() {
        match (row, tally.get(&(w as i64))) {
            (None, None) => {}
            (Some(v), Some(c)) => {
                let n: u64 = c.iter().sum();
                for t in 0..8 {
                    ensure(v[t] == 100.0 * c[t] as f64 / n as f64, || format!("week {w} topic {t}"))?;
                }
                let s: f64 = v.iter().sum();
                ensure((s - 100.0).abs() <= 1e-6, || format!("week {w} sums to {s}"))?;
                rows += 1;
            }
            _ => return Err(format!("week {w}: emptiness differs from tally")),
        }
    }
    ensure(rows == tally.len(), || "week count differs".into())?;
    Ok(format!("{rows} nonempty weeks match the tally exactly"))
}

// 10
fn js_mds() -> Check {
    let mut rng = Rng::new(77);
    let mut dist = |n: usize| -> Vec<f64> {
        let mut p: Vec<f64> = (0..n).map(|_| if rng.below(4) == 0 { 0.0 } else { rng.uniform() }).collect();
        p[0] += 1e-3;
        let s: f64 = p.iter().sum();
        p.into_iter().map(|x| x / s).collect()
    };
    for i in 0..1000 {
        let n = 2 + i % 30;
        let (p, q) = (dist(n), dist(n));
        let a = js_divergence(&p, &q).map_err(|e| e.to_string())?;
        let b = js_divergence(&q, &p).map_err(|e| e.to_string())?;
        ensure((a - b).abs() <= 1e-12, || format!("pair {i}: asymmetric by {:.2e}", (a - b).abs()))?;
        ensure((-1e-12..=std::f64::consts::LN_2 + 1e-12).contains(&a), || format!("pair {i}: JS = {a}"))?;
    }
    let s = 0.41;
    let mut d = SymMatrix::zeros(3);
    for i in 0..3 {
        for j in 0..3 {
            d.set(i, j, if i == j { 0.0 } else { s });
        }
    }
    let c = classical_mds(&d).map_err(|e| e.to_string())?;
    // analytic: vertices at circumradius s/sqrt(3), pairwise distance s, centred
    let mut worst: f64 = 0.0;
    for p in &c {
        worst = worst.max(((p[0] * p[0] + p[1] * p[1]).sqrt() - s / 3f64.sqrt()).abs());
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        worst = worst.max((((c[i][0] - c[j][0]).powi(2) + (c[i][1] - c[j][1]).powi(2)).sqrt() - s).abs());
    }
    ensure(worst <= 1e-6, || format!("triangle off by {worst:.2e}"))?;
    Ok(format!("1000 pairs symmetric and bounded; triangle error {worst:.1e}"))
}

// 11
fn end_to_end() -> Check {
    let config = repo_root().join("data/sample/config.toml");
    let mut manifests = Vec::new();
    let dirs = [tempfile::tempdir().map_err(|e| e.to_string())?, tempfile::tempdir().map_err(|e| e.to_string())?];
    for dir in &dirs {
        let out = bin()
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(dir.path())
            .arg("pipeline")
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
        manifests.push(fs::read(dir.path().join("report/manifest.json")).map_err(|e| e.to_string())?);
    }
    ensure(manifests[0] == manifests[1], || "manifests differ between runs".into())?;
    let m: topictrace::report_dir::Manifest = serde_json::from_slice(&manifests[0]).map_err(|e| e.to_string())?;
    ensure(m.artifacts.len() >= 7 && m.missing.is_empty(), || format!("{} artifacts, {} missing", m.artifacts.len(), m.missing.len()))?;
    Ok(format!("two pipeline runs, identical manifests with {} artifacts", m.artifacts.len()))
}

type Criterion = (u32, &'static str, u64, fn() -> Check);

fn main() {
    let criteria: [Criterion; 11] = [
        (1, "Porter stemmer reference", 5, porter),
        (2, "split arithmetic", 60, split_arithmetic),
        (3, "LR gradient check", 10, gradient_check),
        (4, "classifier sanity", 30, classifier_sanity),
        (5, "SMOTE properties", 60, smote_properties),
        (6, "TF-IDF oracle", 60, tfidf_oracle),
        (7, "LDA planted recovery", 60, lda_recovery),
        (8, "coherence sweep", 300, coherence_sweep),
        (9, "trend oracle", 60, trend_oracle),
        (10, "JS divergence and MDS", 60, js_mds),
        (11, "end-to-end determinism", 180, end_to_end),
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (n, name, limit, f) in criteria {
        if !filter.is_empty() && !filter.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let result = f();
        let took = start.elapsed();
        let result = result.and_then(|msg| {
            ensure(took <= Duration::from_secs(limit), || format!("{msg}; over the {limit} s limit"))?;
            Ok(msg)
        });
        let (tag, msg) = match &result {
            Ok(m) => ("PASS", m),
            Err(m) => ("FAIL", m),
        };
        println!("criterion {n:>2} {tag} {name}: {msg} [{:.2} s, limit {limit} s]", took.as_secs_f64());
        failed += result.is_err() as u32;
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
