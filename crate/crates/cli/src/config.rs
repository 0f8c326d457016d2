//! Run configuration, read from TOML. Relative paths in the file resolve
//! against the file's own directory. Command-line flags override file values.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use topictrace_core::classify::{ModelKind, SmoteParams, SplitSpec, TrainParams};
use topictrace_core::features::FeatureKind;
use topictrace_core::time::Day;
use topictrace_core::topics::{CoherenceMeasure, LdaParams};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub threads: Option<usize>,
    pub out: PathBuf,
    pub paths: Paths,
    pub preprocess: Preprocess,
    pub features: Features,
    pub split: Split,
    pub model: Model,
    pub smote: Smote,
    pub cv: Cv,
    pub lda: Lda,
    pub trends: Trends,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            threads: None,
            out: PathBuf::from("out"),
            paths: Paths::default(),
            preprocess: Preprocess::default(),
            features: Features::default(),
            split: Split::default(),
            model: Model::default(),
            smote: Smote::default(),
            cv: Cv::default(),
            lda: Lda::default(),
            trends: Trends::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    /// Hand-labeled documents used to train and evaluate the classifier.
    pub labeled: Option<PathBuf>,
    /// The full collection to label and topic-model.
    pub corpus: Option<PathBuf>,
    pub stoplist: Option<PathBuf>,
    pub keywords: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub timeline: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Preprocess {
    pub strip_urls: bool,
    pub strip_mentions_hashmarks: bool,
    pub strip_non_ascii: bool,
    pub min_tokens: usize,
}

impl Default for Preprocess {
    fn default() -> Self {
        Preprocess { strip_urls: true, strip_mentions_hashmarks: true, strip_non_ascii: true, min_tokens: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FeatureChoice {
    Tfidf,
    Embeddings,
}

impl From<FeatureChoice> for FeatureKind {
    fn from(f: FeatureChoice) -> Self {
        match f {
            FeatureChoice::Tfidf => FeatureKind::Tfidf,
            FeatureChoice::Embeddings => FeatureKind::EmbeddingPca,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Features {
    pub kind: FeatureChoice,
    pub min_df: usize,
    pub max_df_ratio: f64,
    pub pca_components: usize,
}

impl Default for Features {
    fn default() -> Self {
        Features { kind: FeatureChoice::Tfidf, min_df: 2, max_df_ratio: 0.95, pca_components: 300 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Split {
    pub train: f64,
    pub test: f64,
    pub validation: f64,
    pub stratified: bool,
}

impl Default for Split {
    fn default() -> Self {
        Split { train: 0.75, test: 0.15, validation: 0.10, stratified: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelChoice {
    Logreg,
    Svm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Model {
    pub kind: ModelChoice,
    pub epochs: Option<usize>,
    pub regularization: Option<f64>,
    pub eta0: Option<f64>,
    pub decay_epochs: Option<f64>,
}

impl Default for Model {
    fn default() -> Self {
        Model { kind: ModelChoice::Svm, epochs: None, regularization: None, eta0: None, decay_epochs: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Smote {
    pub enabled: bool,
    pub ratio: f64,
    pub k: usize,
}

impl Default for Smote {
    fn default() -> Self {
        Smote { enabled: true, ratio: 1.0, k: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Cv {
    pub folds: usize,
}

impl Default for Cv {
    fn default() -> Self {
        Cv { folds: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Lda {
    /// Fixed topic count. When absent, `topics` uses the sweep's selection.
    pub k: Option<usize>,
    pub k_min: usize,
    pub k_max: usize,
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub min_df: usize,
    pub max_df_ratio: f64,
    pub coherence: CoherenceMeasure,
    pub top_n: usize,
}

impl Default for Lda {
    fn default() -> Self {
        Lda {
            k: None,
            k_min: 2,
            k_max: 10,
            alpha: None,
            beta: 0.01,
            iterations: 1000,
            burn_in: 500,
            thin: 10,
            min_df: 5,
            max_df_ratio: 0.5,
            coherence: CoherenceMeasure::Umass,
            top_n: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Trends {
    pub origin: String,
    pub top_m: usize,
    /// Human theme names, one per topic. Defaults to `Topic 1..K`.
    pub themes: Vec<String>,
}

impl Default for Trends {
    fn default() -> Self {
        Trends { origin: "2020-01-01".into(), top_m: 3, themes: Vec::new() }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(q) = p {
                if q.is_relative() {
                    *q = base.join(&*q);
                }
            }
        };
        let p = &mut self.paths;
        for slot in [&mut p.labeled, &mut p.corpus, &mut p.stoplist, &mut p.keywords, &mut p.embeddings, &mut p.timeline] {
            fix(slot);
        }
        if self.out.is_relative() {
            self.out = base.join(&self.out);
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        let s = &self.split;
        if (s.train + s.test + s.validation - 1.0).abs() > 1e-9 {
            return Err(CliError::Config("split fractions must sum to 1".into()));
        }
        if self.cv.folds < 2 {
            return Err(CliError::Config("cv.folds must be at least 2".into()));
        }
        if self.lda.k_min < 2 || self.lda.k_max < self.lda.k_min {
            return Err(CliError::Config("lda needs 2 <= k_min <= k_max".into()));
        }
        if matches!(self.lda.k, Some(k) if k < 2) {
            return Err(CliError::Config("lda.k must be at least 2".into()));
        }
        if self.lda.iterations <= self.lda.burn_in {
            return Err(CliError::Config("lda.iterations must exceed lda.burn_in".into()));
        }
        if self.smote.ratio.is_nan() || self.smote.ratio <= 0.0 {
            return Err(CliError::Config("smote.ratio must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        self.origin()?;
        let p = &self.paths;
        for path in [&p.labeled, &p.corpus, &p.stoplist, &p.keywords, &p.embeddings, &p.timeline].into_iter().flatten() {
            if !path.exists() {
                return Err(CliError::Io { path: path.clone(), source: std::io::ErrorKind::NotFound.into() });
            }
        }
        Ok(())
    }

    pub fn origin(&self) -> CliResult<Day> {
        crate::io::parse_day(&self.trends.origin)
            .ok_or_else(|| CliError::Config(format!("trends.origin '{}' is not YYYY-MM-DD", self.trends.origin)))
    }

    pub fn threads(&self) -> usize {
        self.threads
            .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
            .max(1)
    }

    pub fn split_spec(&self) -> SplitSpec {
        SplitSpec {
            train_frac: self.split.train,
            test_frac: self.split.test,
            val_frac: self.split.validation,
            seed: topictrace_core::rng::derive_seed(self.seed, "split"),
            stratified: self.split.stratified,
        }
    }

    pub fn train_params(&self) -> TrainParams {
        let fk = self.features.kind.into();
        let seed = topictrace_core::rng::derive_seed(self.seed, "train");
        let mut p = match self.model.kind {
            ModelChoice::Logreg => TrainParams::logistic(fk, seed),
            ModelChoice::Svm => TrainParams::svm(fk, seed),
        };
        if let Some(e) = self.model.epochs {
            p.epochs = e;
        }
        if let Some(r) = self.model.regularization {
            p.regularization = r;
        }
        if p.kind == ModelKind::LogisticRegression {
            if let Some(e) = self.model.eta0 {
                p.eta0 = e;
            }
            if let Some(d) = self.model.decay_epochs {
                p.decay_epochs = d;
            }
        }
        p
    }

    pub fn smote_params(&self) -> SmoteParams {
        SmoteParams { enabled: self.smote.enabled, ratio: self.smote.ratio, k: self.smote.k }
    }

    /// LDA parameters for `k` topics; the seed is filled in by the caller.
    pub fn lda_params(&self, k: usize, seed: u64) -> LdaParams {
        LdaParams {
            k,
            alpha: self.lda.alpha,
            beta: self.lda.beta,
            iterations: self.lda.iterations,
            burn_in: self.lda.burn_in,
            thin: self.lda.thin,
            checkpoint_every: 10,
            seed,
        }
    }
}
