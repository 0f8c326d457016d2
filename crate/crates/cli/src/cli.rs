//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use topictrace_core::topics::CoherenceMeasure;

use crate::config::{FeatureChoice, ModelChoice, RunConfig};
use crate::error::CliResult;
use crate::{report_dir, sample, stages};

#[derive(Debug, Parser)]
#[command(name = "topictrace", version, about = "Filter a keyword-collected corpus, model its topics and report weekly trends")]
pub struct Cli {
    /// TOML run configuration; relative paths inside resolve against its directory
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Master seed; every stage derives its own seed from it
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Output directory for all artifacts
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads (default: available cores)
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    /// Labeled documents (JSONL or CSV with id,text,ts,label)
    #[arg(long, global = true, value_name = "PATH")]
    pub labeled: Option<PathBuf>,
    /// Unlabeled collection (JSONL or CSV with id,text,ts)
    #[arg(long, global = true, value_name = "PATH")]
    pub corpus: Option<PathBuf>,
    /// Event timeline (JSON array of {start, end, description})
    #[arg(long, global = true, value_name = "PATH")]
    pub timeline: Option<PathBuf>,
    /// Precomputed document embeddings (CSV: id followed by vector components)
    #[arg(long, global = true, value_name = "PATH")]
    pub embeddings: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct ModelArgs {
    /// Classifier
    #[arg(long, value_enum)]
    pub model: Option<ModelChoice>,
    /// Feature space
    #[arg(long, value_enum)]
    pub features: Option<FeatureChoice>,
    /// Minority target as a fraction of the majority count
    #[arg(long, value_name = "R")]
    pub smote_ratio: Option<f64>,
    /// Neighbours used by SMOTE
    #[arg(long, value_name = "K")]
    pub smote_k: Option<usize>,
    /// Train on the real points only
    #[arg(long)]
    pub no_smote: bool,
}

#[derive(Debug, Args, Default)]
pub struct SweepArgs {
    /// Smallest K in the sweep
    #[arg(long, value_name = "K")]
    pub k_min: Option<usize>,
    /// Largest K in the sweep
    #[arg(long, value_name = "K")]
    pub k_max: Option<usize>,
    /// Coherence measure
    #[arg(long, value_enum)]
    pub coherence: Option<CoherenceArg>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum CoherenceArg {
    Umass,
    Npmi,
}

impl From<CoherenceArg> for CoherenceMeasure {
    fn from(c: CoherenceArg) -> Self {
        match c {
            CoherenceArg::Umass => CoherenceMeasure::Umass,
            CoherenceArg::Npmi => CoherenceMeasure::Npmi,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Clean, tokenize, stem and deduplicate the inputs
    Preprocess,
    /// Fit the classifier on the training split and score test and validation
    Train(ModelArgs),
    /// Stratified k-fold cross-validation
    Cv {
        #[command(flatten)]
        model: ModelArgs,
        /// Number of folds
        #[arg(long, value_name = "K")]
        folds: Option<usize>,
    },
    /// Label the collection and write the relevant-only corpus
    Predict {
        /// Model saved by `train` (default: <out>/model.json)
        #[arg(long, value_name = "PATH")]
        model_file: Option<PathBuf>,
    },
    /// Fit LDA models over a range of K and pick the most coherent
    Sweep(SweepArgs),
    /// Fit the final LDA model
    Topics {
        /// Number of topics (default: lda.k, else the sweep's choice)
        #[arg(long, value_name = "K")]
        k: Option<usize>,
    },
    /// Weekly topic percentages and event alignment
    Trends {
        /// First day of week 0 (YYYY-MM-DD)
        #[arg(long, value_name = "DATE")]
        origin: Option<String>,
    },
    /// Assemble the report directory and manifest
    Report,
    /// Run every stage in order
    Pipeline {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        /// Number of folds
        #[arg(long, value_name = "K")]
        folds: Option<usize>,
        /// Skip cross-validation
        #[arg(long)]
        no_cv: bool,
    },
    /// Write the bundled synthetic sample (labeled set, collection, timeline, config)
    GenerateSample {
        /// Target directory
        #[arg(long, value_name = "DIR", default_value = "data/sample")]
        dir: PathBuf,
        /// Documents in the unlabeled collection
        #[arg(long, value_name = "N", default_value_t = sample::SAMPLE_COLLECTION)]
        n: usize,
    },
}

impl ModelArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(m) = self.model {
            cfg.model.kind = m;
        }
        if let Some(f) = self.features {
            cfg.features.kind = f;
        }
        if let Some(r) = self.smote_ratio {
            cfg.smote.ratio = r;
        }
        if let Some(k) = self.smote_k {
            cfg.smote.k = k;
        }
        if self.no_smote {
            cfg.smote.enabled = false;
        }
    }
}

impl SweepArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(k) = self.k_min {
            cfg.lda.k_min = k;
        }
        if let Some(k) = self.k_max {
            cfg.lda.k_max = k;
        }
        if let Some(c) = self.coherence {
            cfg.lda.coherence = c.into();
        }
    }
}

impl Cli {
    /// Config file (or defaults) with command-line overrides applied.
    pub fn config(&self) -> CliResult<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        if let Some(t) = self.threads {
            cfg.threads = Some(t);
        }
        for (slot, flag) in [
            (&mut cfg.paths.labeled, &self.labeled),
            (&mut cfg.paths.corpus, &self.corpus),
            (&mut cfg.paths.timeline, &self.timeline),
            (&mut cfg.paths.embeddings, &self.embeddings),
        ] {
            if flag.is_some() {
                slot.clone_from(flag);
            }
        }
        match &self.command {
            Command::Train(m) => m.apply(&mut cfg),
            Command::Cv { model, folds } => {
                model.apply(&mut cfg);
                if let Some(f) = folds {
                    cfg.cv.folds = *f;
                }
            }
            Command::Sweep(s) => s.apply(&mut cfg),
            Command::Topics { k: Some(k) } => cfg.lda.k = Some(*k),
            Command::Trends { origin: Some(o) } => cfg.trends.origin = o.clone(),
            Command::Pipeline { model, sweep, folds, .. } => {
                model.apply(&mut cfg);
                sweep.apply(&mut cfg);
                if let Some(f) = folds {
                    cfg.cv.folds = *f;
                }
            }
            _ => {}
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs every stage whose inputs are configured. Classification stages run
/// only with a labeled set; prediction only with a collection as well.
pub fn pipeline(cfg: &RunConfig, cv: bool) -> CliResult<report_dir::Manifest> {
    stages::preprocess_stage(cfg)?;
    if cfg.paths.labeled.is_some() {
        stages::train_stage(cfg)?;
        if cv {
            stages::cv_stage(cfg)?;
        }
        if cfg.paths.corpus.is_some() {
            stages::predict_stage(cfg, None)?;
        }
    }
    if cfg.lda.k.is_none() {
        stages::sweep_stage(cfg)?;
    }
    stages::topics_stage(cfg)?;
    stages::trends_stage(cfg)?;
    report_dir::emit_run_report(cfg)
}

pub fn execute(cli: &Cli) -> CliResult<()> {
    if let Command::GenerateSample { dir, n } = &cli.command {
        let seed = cli.seed.unwrap_or(sample::SAMPLE_SEED);
        sample::write_sample(dir, seed, *n)?;
        println!("sample written to {}", dir.display());
        return Ok(());
    }
    let cfg = cli.config()?;
    match &cli.command {
        Command::Preprocess => stages::preprocess_stage(&cfg).map(drop),
        Command::Train(_) => stages::train_stage(&cfg).map(drop),
        Command::Cv { .. } => stages::cv_stage(&cfg).map(drop),
        Command::Predict { model_file } => stages::predict_stage(&cfg, model_file.as_deref()).map(drop),
        Command::Sweep(_) => stages::sweep_stage(&cfg).map(drop),
        Command::Topics { .. } => stages::topics_stage(&cfg).map(drop),
        Command::Trends { .. } => stages::trends_stage(&cfg).map(drop),
        Command::Report => report_dir::emit_run_report(&cfg).map(drop),
        Command::Pipeline { no_cv, .. } => pipeline(&cfg, !no_cv).map(drop),
        Command::GenerateSample { .. } => unreachable!("handled above"),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
