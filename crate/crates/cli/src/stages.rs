//! Pipeline stages. Each stage reads its inputs from the run's output
//! directory (or configured paths) and writes its artifacts back there.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use topictrace_core::balance::Interpolate;
use topictrace_core::classify::{
    bulk_label, cv_folds, evaluate, oversample, run_fold, split, train, CvReport, Fingerprints, LabelSummary,
    LinearModel, Metrics, Sample, TrainParams,
};
use topictrace_core::corpus::{finish_corpus, preprocess, CleanDocument, Label, PreprocessConfig, PreprocessStats};
use topictrace_core::features::{build_vocabulary, pca_fit, tfidf_vectorize, FeatureKind, PcaModel, SparseVector, Vocabulary};
use topictrace_core::rng::{derive_indexed_seed, derive_seed};
use topictrace_core::time::Timestamp;
use topictrace_core::topics::{
    encode_corpus, lda_fit, score_k, select_k, top_words, topic_distribution, umass_coherence, npmi_coherence,
    CoherenceMeasure, DocTopics, SweepPoint, SweepResult, TopicSummary,
};
use topictrace_core::trends::{
    align_events, alignment_markdown, assign_weeks, default_theme_names, dominant_per_week, topic_trend, TrendMatrix,
};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::io;
use crate::parallel::par_map;

/// File names inside the output directory.
pub mod layout {
    pub const STATS: &str = "preprocess_stats.json";
    pub const LABELED_CLEAN: &str = "labeled.clean.jsonl";
    pub const CORPUS_CLEAN: &str = "corpus.clean.jsonl";
    pub const MODEL: &str = "model.json";
    pub const VOCAB: &str = "vocab.json";
    pub const PCA: &str = "pca.json";
    pub const METRICS: &str = "metrics.json";
    pub const CV: &str = "cv.json";
    pub const PREDICTIONS: &str = "predictions.csv";
    pub const LABEL_SUMMARY: &str = "label_summary.json";
    pub const RELEVANT_CLEAN: &str = "relevant.clean.jsonl";
    pub const SWEEP: &str = "sweep.json";
    pub const COHERENCE: &str = "coherence.csv";
    pub const LDA_VOCAB: &str = "lda_vocab.json";
    pub const LDA_MODEL: &str = "lda_model.json";
    pub const TOPICS: &str = "topics.json";
    pub const DOC_TOPICS: &str = "doc_topics.csv";
    pub const DISTRIBUTION: &str = "topic_distribution.csv";
    pub const TREND: &str = "trend.csv";
    pub const TREND_COUNTS: &str = "trend_counts.csv";
    pub const TREND_JSON: &str = "trend.json";
    pub const ALIGNMENT: &str = "alignment.md";
    pub const REPORT: &str = "report";
}

fn out(cfg: &RunConfig, name: &str) -> PathBuf {
    cfg.out.join(name)
}

fn require(path: PathBuf, hint: &str) -> CliResult<PathBuf> {
    if path.exists() {
        Ok(path)
    } else {
        Err(CliError::Data(format!("{}: not found ({hint})", path.display())))
    }
}

// ---------------------------------------------------------------- preprocess

pub fn preprocess_config(cfg: &RunConfig) -> CliResult<PreprocessConfig> {
    let mut pc = PreprocessConfig::default();
    if let Some(p) = &cfg.paths.stoplist {
        pc.stopwords = io::load_term_list(p)?;
    }
    if let Some(p) = &cfg.paths.keywords {
        pc.collection_keywords = io::load_term_list(p)?;
    }
    pc.strip_urls = cfg.preprocess.strip_urls;
    pc.strip_mentions_hashmarks = cfg.preprocess.strip_mentions_hashmarks;
    pc.strip_non_ascii = cfg.preprocess.strip_non_ascii;
    pc.min_tokens = cfg.preprocess.min_tokens;
    Ok(pc)
}

#[derive(Debug, Default, Serialize, Deserialize)]
pub struct StatsFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labeled: Option<PreprocessStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus: Option<PreprocessStats>,
}

fn clean_file(cfg: &RunConfig, src: &Path, dst: &str, pc: &PreprocessConfig) -> CliResult<PreprocessStats> {
    let raw = io::load_corpus(src)?;
    let cleaned: Vec<Option<CleanDocument>> = par_map(&raw, cfg.threads(), |d| preprocess(d, pc));
    let (docs, stats) = finish_corpus(raw.len(), cleaned.into_iter().flatten().collect(), pc.min_tokens);
    io::write_clean(&out(cfg, dst), &docs)?;
    println!(
        "{}: {} total, {} empty, {} duplicates, {} unique ({} relevant, {} irrelevant, {} unlabeled)",
        src.display(),
        stats.total,
        stats.empty,
        stats.duplicates,
        stats.unique,
        stats.relevant,
        stats.irrelevant,
        stats.unlabeled
    );
    Ok(stats)
}

pub fn preprocess_stage(cfg: &RunConfig) -> CliResult<StatsFile> {
    if cfg.paths.labeled.is_none() && cfg.paths.corpus.is_none() {
        return Err(CliError::Usage("no input: set paths.labeled or paths.corpus (or --labeled / --corpus)".into()));
    }
    let pc = preprocess_config(cfg)?;
    let mut stats = StatsFile::default();
    if let Some(p) = &cfg.paths.labeled {
        stats.labeled = Some(clean_file(cfg, p, layout::LABELED_CLEAN, &pc)?);
    }
    if let Some(p) = &cfg.paths.corpus {
        stats.corpus = Some(clean_file(cfg, p, layout::CORPUS_CLEAN, &pc)?);
    }
    io::write_json(&out(cfg, layout::STATS), &stats)?;
    Ok(stats)
}

// ---------------------------------------------------------------- features

/// A fitted feature space: a TF-IDF vocabulary or a PCA projection of
/// precomputed embeddings.
pub enum FeatureSpace {
    Tfidf(Vocabulary),
    Pca(PcaModel),
}

impl FeatureSpace {
    pub fn fingerprints(&self) -> Fingerprints {
        match self {
            FeatureSpace::Tfidf(v) => Fingerprints { vocabulary: Some(v.fingerprint()), pca: None },
            FeatureSpace::Pca(p) => Fingerprints { vocabulary: None, pca: Some(p.fingerprint()) },
        }
    }
}

fn labeled_docs(cfg: &RunConfig) -> CliResult<(Vec<CleanDocument>, Vec<Label>)> {
    let path = require(out(cfg, layout::LABELED_CLEAN), "run preprocess with paths.labeled set")?;
    let docs: Vec<CleanDocument> = io::read_clean(&path)?.into_iter().filter(|d| d.label.is_some()).collect();
    if docs.is_empty() {
        return Err(CliError::Data(format!("{}: no labeled documents", path.display())));
    }
    let labels = docs.iter().map(|d| d.label.expect("filtered")).collect();
    Ok((docs, labels))
}

fn load_embeddings_for(cfg: &RunConfig, docs: &[CleanDocument]) -> CliResult<Vec<Vec<f64>>> {
    let path = cfg
        .paths
        .embeddings
        .as_ref()
        .ok_or_else(|| CliError::Usage("embedding features need --embeddings or paths.embeddings".into()))?;
    let emb = io::load_embeddings(path)?;
    let known: BTreeSet<&str> = docs.iter().map(|d| d.id.as_str()).collect();
    let unknown = emb.unknown_ids(&known);
    if !unknown.is_empty() {
        eprintln!("warning: {} embedding ids not in the corpus (first: {})", unknown.len(), unknown[0]);
    }
    emb.lookup(docs.iter().map(|d| d.id.as_str()))
}

fn fit_space(cfg: &RunConfig, train_docs: &[CleanDocument], train_vectors: Option<&[Vec<f64>]>) -> CliResult<FeatureSpace> {
    match train_vectors {
        None => Ok(FeatureSpace::Tfidf(build_vocabulary(train_docs, cfg.features.min_df, cfg.features.max_df_ratio)?)),
        Some(v) => {
            let d = v.first().map_or(0, Vec::len);
            let k = cfg.features.pca_components.min(d).min(v.len().saturating_sub(1)).max(1);
            Ok(FeatureSpace::Pca(pca_fit(v, k)?))
        }
    }
}

/// Runs `f` on the rows of whichever feature space is active.
trait RowsFn {
    type Out;
    fn call<P: Sample + Interpolate + Send + Sync>(self, rows: Vec<P>) -> CliResult<Self::Out>;
}

fn with_rows<F: RowsFn>(
    space: &FeatureSpace,
    docs: &[CleanDocument],
    vectors: Option<&[Vec<f64>]>,
    f: F,
) -> CliResult<F::Out> {
    match space {
        FeatureSpace::Tfidf(v) => f.call(docs.iter().map(|d| tfidf_vectorize(&d.tokens, v)).collect::<Vec<SparseVector>>()),
        FeatureSpace::Pca(p) => {
            let vectors = vectors.ok_or_else(|| CliError::Data("missing embeddings".into()))?;
            let rows = vectors.iter().map(|x| p.transform(x)).collect::<Result<Vec<_>, _>>()?;
            f.call(rows)
        }
    }
}

// ---------------------------------------------------------------- train

#[derive(Debug, Serialize, Deserialize)]
pub struct SplitSizes {
    pub train: usize,
    pub test: usize,
    pub validation: usize,
    pub synthetic: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TrainReport {
    pub model: String,
    pub features: FeatureKind,
    pub sizes: SplitSizes,
    pub train: Metrics,
    pub test: Metrics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<Metrics>,
}

struct TrainFit<'a> {
    y: &'a [Label],
    parts: &'a topictrace_core::classify::Split,
    params: &'a TrainParams,
    cfg: &'a RunConfig,
}

impl RowsFn for TrainFit<'_> {
    type Out = (LinearModel, TrainReport);

    fn call<P: Sample + Interpolate + Send + Sync>(self, rows: Vec<P>) -> CliResult<Self::Out> {
        let pick = |idx: &[usize]| -> (Vec<P>, Vec<Label>) {
            idx.iter().map(|&i| (rows[i].clone(), self.y[i])).unzip()
        };
        let (real_x, real_y) = pick(&self.parts.train);
        let (mut tx, mut ty) = (real_x.clone(), real_y.clone());
        let synthetic = oversample(&mut tx, &mut ty, &self.cfg.smote_params(), derive_seed(self.cfg.seed, "smote"))?;
        let model = train(&tx, &ty, self.params)?;
        let (sx, sy) = pick(&self.parts.test);
        let (vx, vy) = pick(&self.parts.validation);
        let report = TrainReport {
            model: format!("{:?}", model.kind),
            features: model.feature_kind,
            sizes: SplitSizes {
                train: self.parts.train.len(),
                test: self.parts.test.len(),
                validation: self.parts.validation.len(),
                synthetic,
            },
            train: evaluate(&model, &real_x, &real_y)?,
            test: evaluate(&model, &sx, &sy)?,
            validation: if vx.is_empty() { None } else { Some(evaluate(&model, &vx, &vy)?) },
        };
        Ok((model, report))
    }
}

pub fn train_stage(cfg: &RunConfig) -> CliResult<TrainReport> {
    let (docs, y) = labeled_docs(cfg)?;
    let parts = split(&y, &cfg.split_spec())?;
    let params = cfg.train_params();
    let vectors = match params.feature_kind {
        FeatureKind::Tfidf => None,
        FeatureKind::EmbeddingPca => Some(load_embeddings_for(cfg, &docs)?),
    };
    let train_docs: Vec<CleanDocument> = parts.train.iter().map(|&i| docs[i].clone()).collect();
    let train_vectors: Option<Vec<Vec<f64>>> = vectors.as_ref().map(|v| parts.train.iter().map(|&i| v[i].clone()).collect());
    let space = fit_space(cfg, &train_docs, train_vectors.as_deref())?;
    let (mut model, report) =
        with_rows(&space, &docs, vectors.as_deref(), TrainFit { y: &y, parts: &parts, params: &params, cfg })?;
    model.fingerprints = space.fingerprints();
    io::write_json(&out(cfg, layout::MODEL), &model)?;
    match &space {
        FeatureSpace::Tfidf(v) => io::write_json(&out(cfg, layout::VOCAB), v)?,
        FeatureSpace::Pca(p) => io::write_json(&out(cfg, layout::PCA), p)?,
    }
    io::write_json(&out(cfg, layout::METRICS), &report)?;
    println!(
        "train: {} train / {} test / {} validation, {} synthetic; test accuracy {:.3}, f1 {:.3}",
        report.sizes.train, report.sizes.test, report.sizes.validation, report.sizes.synthetic, report.test.accuracy, report.test.f1
    );
    Ok(report)
}

// ---------------------------------------------------------------- cv

struct FoldEval<'a> {
    y: &'a [Label],
    folds: &'a [usize],
    fold: usize,
    params: &'a TrainParams,
    cfg: &'a RunConfig,
}

impl RowsFn for FoldEval<'_> {
    type Out = (Metrics, usize);

    fn call<P: Sample + Interpolate + Send + Sync>(self, rows: Vec<P>) -> CliResult<Self::Out> {
        let seed = derive_seed(self.cfg.seed, "cv");
        Ok(run_fold(&rows, self.y, self.folds, self.fold, self.params, &self.cfg.smote_params(), seed)?)
    }
}

/// Stratified k-fold CV. The vocabulary or PCA projection is refit on each
/// fold's training portion, and SMOTE touches only that portion.
pub fn cv_stage(cfg: &RunConfig) -> CliResult<CvReport> {
    let (docs, y) = labeled_docs(cfg)?;
    let params = cfg.train_params();
    let vectors = match params.feature_kind {
        FeatureKind::Tfidf => None,
        FeatureKind::EmbeddingPca => Some(load_embeddings_for(cfg, &docs)?),
    };
    let k = cfg.cv.folds;
    let folds = cv_folds(&y, k, derive_seed(cfg.seed, "cv"))?;
    let fold_ids: Vec<usize> = (0..k).collect();
    let results = par_map(&fold_ids, cfg.threads(), |&f| -> CliResult<(Metrics, usize)> {
        let keep: Vec<usize> = (0..docs.len()).filter(|&i| folds[i] != f).collect();
        let tdocs: Vec<CleanDocument> = keep.iter().map(|&i| docs[i].clone()).collect();
        let tvec: Option<Vec<Vec<f64>>> = vectors.as_ref().map(|v| keep.iter().map(|&i| v[i].clone()).collect());
        let space = fit_space(cfg, &tdocs, tvec.as_deref())?;
        with_rows(&space, &docs, vectors.as_deref(), FoldEval { y: &y, folds: &folds, fold: f, params: &params, cfg })
    });
    let (metrics, synthetic): (Vec<Metrics>, Vec<usize>) = results.into_iter().collect::<CliResult<Vec<_>>>()?.into_iter().unzip();
    let report = CvReport::from_folds(metrics, synthetic);
    io::write_json(&out(cfg, layout::CV), &report)?;
    println!(
        "cv: {k} folds, accuracy {:.3} +/- {:.3}, f1 {:.3} +/- {:.3}",
        report.mean.accuracy, report.std.accuracy, report.mean.f1, report.std.f1
    );
    Ok(report)
}

// ---------------------------------------------------------------- predict

struct Label_<'a> {
    model: &'a LinearModel,
}

impl RowsFn for Label_<'_> {
    type Out = (Vec<topictrace_core::classify::Prediction>, LabelSummary);

    fn call<P: Sample + Interpolate + Send + Sync>(self, rows: Vec<P>) -> CliResult<Self::Out> {
        Ok(bulk_label(self.model, &rows)?)
    }
}

/// Labels the collection with a trained model, writes `id,label,score` and
/// the relevant-only corpus for topic modeling. Documents that already carry
/// a human label keep it in the relevant-only corpus.
pub fn predict_stage(cfg: &RunConfig, model_file: Option<&Path>) -> CliResult<LabelSummary> {
    let model_path = model_file.map(Path::to_path_buf).unwrap_or_else(|| out(cfg, layout::MODEL));
    let model: LinearModel = io::read_json(&require(model_path.clone(), "run train first")?)?;
    let model_dir = model_path.parent().unwrap_or(Path::new("")).to_path_buf();
    let corpus_path = require(out(cfg, layout::CORPUS_CLEAN), "run preprocess with paths.corpus set")?;
    let docs = io::read_clean(&corpus_path)?;
    let (space, vectors) = match model.feature_kind {
        FeatureKind::Tfidf => (FeatureSpace::Tfidf(io::read_json(&require(model_dir.join(layout::VOCAB), "vocabulary saved by train")?)?), None),
        FeatureKind::EmbeddingPca => (
            FeatureSpace::Pca(io::read_json(&require(model_dir.join(layout::PCA), "PCA saved by train")?)?),
            Some(load_embeddings_for(cfg, &docs)?),
        ),
    };
    model.check_fingerprints(&space.fingerprints())?;
    let (preds, summary) = with_rows(&space, &docs, vectors.as_deref(), Label_ { model: &model })?;
    let rows = docs
        .iter()
        .zip(&preds)
        .map(|(d, p)| vec![d.id.clone(), p.label.as_str().to_string(), format!("{:.6}", p.score)]);
    let header = ["id", "label", "score"].map(String::from);
    io::write_text(&out(cfg, layout::PREDICTIONS), &io::csv_string(&header, rows))?;
    io::write_json(&out(cfg, layout::LABEL_SUMMARY), &summary)?;
    let relevant: Vec<CleanDocument> = docs
        .iter()
        .zip(&preds)
        .filter(|(d, p)| d.label.unwrap_or(p.label) == Label::Relevant)
        .map(|(d, _)| d.clone())
        .collect();
    io::write_clean(&out(cfg, layout::RELEVANT_CLEAN), &relevant)?;
    println!(
        "predict: {} relevant, {} irrelevant ({:.3} relevant)",
        summary.n_relevant, summary.n_irrelevant, summary.relevant_fraction
    );
    Ok(summary)
}

// ---------------------------------------------------------------- topics

/// The topic-modeling corpus: the classifier's relevant output when present,
/// otherwise the cleaned collection, otherwise the cleaned labeled set.
fn topic_corpus(cfg: &RunConfig) -> CliResult<Vec<CleanDocument>> {
    for name in [layout::RELEVANT_CLEAN, layout::CORPUS_CLEAN, layout::LABELED_CLEAN] {
        let p = out(cfg, name);
        if p.exists() {
            return io::read_clean(&p);
        }
    }
    Err(CliError::Data(format!("{}: no cleaned corpus found; run preprocess first", cfg.out.display())))
}

struct LdaInput {
    docs: Vec<CleanDocument>,
    encoded: Vec<Vec<u32>>,
    vocab: Vocabulary,
}

/// Builds the LDA vocabulary and drops documents with no surviving token.
fn lda_input(cfg: &RunConfig) -> CliResult<LdaInput> {
    let docs = topic_corpus(cfg)?;
    let vocab = build_vocabulary(&docs, cfg.lda.min_df, cfg.lda.max_df_ratio)?;
    let encoded = encode_corpus(&docs, &vocab);
    let (docs, encoded): (Vec<_>, Vec<_>) = docs.into_iter().zip(encoded).filter(|(_, e)| !e.is_empty()).unzip();
    Ok(LdaInput { docs, encoded, vocab })
}

fn sweep_seed(cfg: &RunConfig) -> u64 {
    derive_seed(cfg.seed, "lda")
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SweepFile {
    pub measure: CoherenceMeasure,
    #[serde(flatten)]
    pub result: SweepResult,
}

/// Fits one model per K (concurrently, one thread per K at most) and picks
/// the K with the highest mean coherence.
pub fn sweep_stage(cfg: &RunConfig) -> CliResult<SweepFile> {
    let input = lda_input(cfg)?;
    let ks: Vec<usize> = (cfg.lda.k_min..=cfg.lda.k_max).collect();
    let base = cfg.lda_params(2, 0);
    let master = sweep_seed(cfg);
    let points: Vec<SweepPoint> = par_map(&ks, cfg.threads(), |&k| {
        score_k(&input.encoded, &input.vocab, k, &base, cfg.lda.coherence, cfg.lda.top_n, master)
    });
    let result = SweepResult { selected: select_k(&points), points };
    let header = ["K", "mean_coherence"].map(String::from);
    let rows = result.points.iter().map(|p| vec![p.k.to_string(), p.mean_coherence.map(|c| format!("{c:.6}")).unwrap_or_default()]);
    io::write_text(&out(cfg, layout::COHERENCE), &io::csv_string(&header, rows))?;
    let file = SweepFile { measure: cfg.lda.coherence, result };
    io::write_json(&out(cfg, layout::SWEEP), &file)?;
    for p in &file.result.points {
        if let Some(e) = &p.error {
            eprintln!("warning: sweep K={} failed: {e}", p.k);
        }
    }
    match file.result.selected {
        Some(k) => println!("sweep: {} docs, V={}, selected K={k}", input.docs.len(), input.vocab.len()),
        None => return Err(CliError::Data("sweep: every K failed".into())),
    }
    Ok(file)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TopicsOutcome {
    pub k: usize,
    pub docs: usize,
    pub coherence: f64,
}

pub fn theme_names(cfg: &RunConfig, k: usize) -> Vec<String> {
    if cfg.trends.themes.len() == k {
        cfg.trends.themes.clone()
    } else {
        if !cfg.trends.themes.is_empty() {
            eprintln!("warning: {} theme names configured for {k} topics; using defaults", cfg.trends.themes.len());
        }
        default_theme_names(k)
    }
}

/// Fits the final model. K comes from `lda.k`, else the sweep's selection.
/// The fit seed matches the sweep's seed for that K.
pub fn topics_stage(cfg: &RunConfig) -> CliResult<TopicsOutcome> {
    let k = match cfg.lda.k {
        Some(k) => k,
        None => {
            let sweep_path = require(out(cfg, layout::SWEEP), "run sweep first or set lda.k")?;
            let sweep: SweepFile = io::read_json(&sweep_path)?;
            sweep.result.selected.ok_or_else(|| CliError::Data("sweep selected no K".into()))?
        }
    };
    let input = lda_input(cfg)?;
    let params = cfg.lda_params(k, derive_indexed_seed(sweep_seed(cfg), "lda-sweep", k as u64));
    let (model, doc_topics) = lda_fit(&input.encoded, &input.vocab, &params)?;
    let coherence = match cfg.lda.coherence {
        CoherenceMeasure::Umass => umass_coherence(&model, &input.vocab, &input.encoded, cfg.lda.top_n)?,
        CoherenceMeasure::Npmi => npmi_coherence(&model, &input.vocab, &input.encoded, cfg.lda.top_n, 10)?,
    };
    let names = theme_names(cfg, k);
    let summaries = (0..k)
        .map(|t| {
            let mut s = top_words(&model, &input.vocab, t, cfg.lda.top_n.min(input.vocab.len()))?;
            s.theme = Some(names[t].clone());
            Ok(s)
        })
        .collect::<Result<Vec<TopicSummary>, topictrace_core::Error>>()?;
    io::write_json(&out(cfg, layout::LDA_VOCAB), &input.vocab)?;
    io::write_json(&out(cfg, layout::LDA_MODEL), &model)?;
    io::write_json(&out(cfg, layout::TOPICS), &summaries)?;
    write_doc_topics(&out(cfg, layout::DOC_TOPICS), &input.docs, &doc_topics)?;
    let dist = topic_distribution(&doc_topics, k);
    let header = ["topic", "theme", "percentage"].map(String::from);
    let rows = dist.iter().enumerate().map(|(t, p)| vec![t.to_string(), names[t].clone(), format!("{p:.1}")]);
    io::write_text(&out(cfg, layout::DISTRIBUTION), &io::csv_string(&header, rows))?;
    println!("topics: K={k} over {} docs, mean coherence {:.4}", input.docs.len(), coherence.mean);
    for s in &summaries {
        let words: Vec<&str> = s.terms.iter().take(8).map(|(w, _)| w.as_str()).collect();
        println!("  {} ({:.1}%): {}", s.theme.as_deref().unwrap_or(""), dist[s.topic], words.join(", "));
    }
    Ok(TopicsOutcome { k, docs: input.docs.len(), coherence: coherence.mean })
}

fn write_doc_topics(path: &Path, docs: &[CleanDocument], topics: &[DocTopics]) -> CliResult<()> {
    let k = topics.first().map_or(0, |t| t.theta.len());
    let header: Vec<String> = ["id", "ts", "dominant"]
        .into_iter()
        .map(String::from)
        .chain((0..k).map(|t| format!("theta_{t}")))
        .collect();
    let rows = docs.iter().zip(topics).map(|(d, t)| {
        [d.id.clone(), io::format_timestamp(d.timestamp), t.dominant.to_string()]
            .into_iter()
            .chain(t.theta.iter().map(|x| x.to_string()))
            .collect::<Vec<_>>()
    });
    io::write_text(path, &io::csv_string(&header, rows))
}

/// Rows of `doc_topics.csv`: id, timestamp, dominant topic, theta.
pub fn read_doc_topics(path: &Path) -> CliResult<Vec<(String, Timestamp, DocTopics)>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::data(path, e))?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::data(path, e))?;
        let bad = || CliError::data(path, format!("line {}: malformed row", i + 2));
        let id = rec.get(0).ok_or_else(bad)?.to_string();
        let ts = rec.get(1).and_then(io::parse_timestamp).ok_or_else(bad)?;
        let dominant: usize = rec.get(2).and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let theta = rec.iter().skip(3).map(|s| s.parse::<f64>().ok()).collect::<Option<Vec<f64>>>().ok_or_else(bad)?;
        if dominant >= theta.len() {
            return Err(bad());
        }
        rows.push((id, ts, DocTopics { theta, dominant, assignments: Vec::new() }));
    }
    Ok(rows)
}

// ---------------------------------------------------------------- trends

#[derive(Debug, Serialize, Deserialize)]
pub struct TrendFile {
    pub matrix: TrendMatrix,
    pub top_per_week: Vec<Option<Vec<usize>>>,
}

pub fn trends_stage(cfg: &RunConfig) -> CliResult<TrendMatrix> {
    let path = require(out(cfg, layout::DOC_TOPICS), "run topics first")?;
    let rows = read_doc_topics(&path)?;
    let k = rows.first().map(|r| r.2.theta.len()).ok_or_else(|| CliError::Data(format!("{}: no documents", path.display())))?;
    let stubs: Vec<CleanDocument> =
        rows.iter().map(|(id, ts, _)| CleanDocument { id: id.clone(), tokens: Vec::new(), timestamp: *ts, label: None }).collect();
    let weeks = assign_weeks(&stubs, cfg.origin()?)?;
    let dominant: Vec<usize> = rows.iter().map(|r| r.2.dominant).collect();
    let trend = topic_trend(&dominant, &weeks, k, cfg.origin()?)?;
    io::write_text(&out(cfg, layout::TREND), &io::trend_csv(&trend))?;
    io::write_text(&out(cfg, layout::TREND_COUNTS), &io::trend_counts_csv(&trend))?;
    let file = TrendFile { top_per_week: dominant_per_week(&trend, cfg.trends.top_m), matrix: trend };
    io::write_json(&out(cfg, layout::TREND_JSON), &file)?;
    if let Some(tl) = &cfg.paths.timeline {
        let timeline = io::load_timeline(tl)?;
        let rows = align_events(&file.matrix, &timeline, &theme_names(cfg, k), cfg.trends.top_m)?;
        for r in rows.iter().filter(|r| r.outside_range) {
            eprintln!("warning: timeline entry '{}' lies outside the corpus date range", r.description);
        }
        io::write_text(&out(cfg, layout::ALIGNMENT), &alignment_markdown(&rows))?;
    }
    println!("trends: {} weeks x {k} topics", file.matrix.weeks());
    Ok(file.matrix)
}
