//! The run report: a fixed directory of CSV, JSON, SVG and Markdown files
//! plus a manifest with a SHA-256 per file. Inputs are the stage artifacts
//! already in the output directory; stages that never ran are listed as
//! missing rather than failing the report.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use topictrace_core::classify::CvReport;
use topictrace_core::report::{intertopic_map, render_line_chart, render_topic_map, LineChart, Series};
use topictrace_core::topics::{LdaModel, TopicSummary};
use topictrace_core::trends::default_theme_names;

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::io;
use crate::stages::{layout, read_doc_topics, SweepFile, TrainReport, TrendFile};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    pub name: String,
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MissingStage {
    pub stage: String,
    pub artifacts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub artifacts: Vec<Artifact>,
    pub missing: Vec<MissingStage>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MetricsFile {
    holdout: Option<TrainReport>,
    cv: Option<CvReport>,
}

pub const MANIFEST: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

struct Emitter<'a> {
    dir: &'a Path,
    artifacts: Vec<Artifact>,
    missing: Vec<MissingStage>,
}

impl Emitter<'_> {
    fn put(&mut self, name: &str, file: &str, text: &str) -> CliResult<()> {
        io::write_text(&self.dir.join(file), text)?;
        self.artifacts.push(Artifact {
            name: name.to_string(),
            path: file.to_string(),
            sha256: sha256_hex(text.as_bytes()),
            bytes: text.len() as u64,
        });
        Ok(())
    }

    fn miss(&mut self, stage: &str, files: &[&str]) -> CliResult<()> {
        for f in files {
            let p = self.dir.join(f);
            if p.exists() {
                fs::remove_file(&p).map_err(crate::error::CliError::io(&p))?;
            }
        }
        self.missing.push(MissingStage { stage: stage.to_string(), artifacts: files.iter().map(|f| f.to_string()).collect() });
        Ok(())
    }
}

fn json(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("artifact types serialize") + "\n"
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(crate::error::CliError::io(path))
}

/// Writes `<out>/report/` from whatever stage outputs exist and returns the
/// manifest. The output depends only on those inputs and the seed.
pub fn emit_run_report(cfg: &RunConfig) -> CliResult<Manifest> {
    let src = |name: &str| cfg.out.join(name);
    let dir = cfg.out.join(layout::REPORT);
    fs::create_dir_all(&dir).map_err(crate::error::CliError::io(&dir))?;
    let mut e = Emitter { dir: &dir, artifacts: Vec::new(), missing: Vec::new() };

    if src(layout::PREDICTIONS).exists() {
        e.put("labels", "labels.csv", &read_text(&src(layout::PREDICTIONS))?)?;
    } else {
        e.miss("predict", &["labels.csv"])?;
    }

    let holdout: Option<TrainReport> = src(layout::METRICS).exists().then(|| io::read_json(&src(layout::METRICS))).transpose()?;
    let cv: Option<CvReport> = src(layout::CV).exists().then(|| io::read_json(&src(layout::CV))).transpose()?;
    match (&holdout, &cv) {
        (None, None) => e.miss("train", &["metrics.json"])?,
        _ => {
            if holdout.is_none() {
                e.missing.push(MissingStage { stage: "train".into(), artifacts: vec!["metrics.json#holdout".into()] });
            }
            if cv.is_none() {
                e.missing.push(MissingStage { stage: "cv".into(), artifacts: vec!["metrics.json#cv".into()] });
            }
            e.put("metrics", "metrics.json", &json(&MetricsFile { holdout, cv }))?;
        }
    }

    let summaries: Option<Vec<TopicSummary>> =
        src(layout::TOPICS).exists().then(|| io::read_json(&src(layout::TOPICS))).transpose()?;
    let names = |k: usize| -> Vec<String> {
        match &summaries {
            Some(s) if s.len() == k => {
                s.iter().map(|t| t.theme.clone().unwrap_or_else(|| format!("Topic {}", t.topic + 1))).collect()
            }
            _ => default_theme_names(k),
        }
    };
    match &summaries {
        Some(s) => e.put("topics", "topics.json", &json(s))?,
        None => e.miss("topics", &["topics.json"])?,
    }

    if src(layout::SWEEP).exists() {
        let sweep: SweepFile = io::read_json(&src(layout::SWEEP))?;
        e.put("coherence", "coherence.csv", &read_text(&src(layout::COHERENCE))?)?;
        let measure = serde_json::to_value(sweep.measure).ok().and_then(|v| v.as_str().map(str::to_uppercase)).unwrap_or_default();
        let chart = LineChart {
            title: format!("{measure} coherence by number of topics"),
            x_label: "Number of topics (K)".into(),
            y_label: "Mean coherence".into(),
            x_ticks: sweep.result.points.iter().map(|p| p.k.to_string()).collect(),
            series: vec![Series {
                name: "mean coherence".into(),
                points: sweep.result.points.iter().map(|p| p.mean_coherence).collect(),
            }],
        };
        e.put("coherence_chart", "coherence.svg", &render_line_chart(&chart)?)?;
    } else {
        e.miss("sweep", &["coherence.csv", "coherence.svg"])?;
    }

    if src(layout::TREND_JSON).exists() {
        let trend: TrendFile = io::read_json(&src(layout::TREND_JSON))?;
        let m = &trend.matrix;
        e.put("trend", "trend.csv", &io::trend_csv(m))?;
        let chart = LineChart {
            title: "Weekly topic share".into(),
            x_label: "Week starting".into(),
            y_label: "Documents (%)".into(),
            x_ticks: m.week_starts.iter().map(|d| d.to_string()).collect(),
            series: names(m.k).into_iter().enumerate().map(|(k, name)| Series { name, points: m.series(k) }).collect(),
        };
        e.put("trend_chart", "trend.svg", &render_line_chart(&chart)?)?;
    } else {
        e.miss("trends", &["trend.csv", "trend.svg"])?;
    }

    if src(layout::LDA_MODEL).exists() && src(layout::DOC_TOPICS).exists() {
        let model: LdaModel = io::read_json(&src(layout::LDA_MODEL))?;
        let doc_topics: Vec<_> = read_doc_topics(&src(layout::DOC_TOPICS))?.into_iter().map(|r| r.2).collect();
        let map = intertopic_map(&model, &doc_topics, &names(model.k))?;
        e.put("topic_map", "topic_map.svg", &render_topic_map(&map)?)?;
    } else {
        e.miss("topics", &["topic_map.svg"])?;
    }

    if src(layout::ALIGNMENT).exists() {
        e.put("alignment", "alignment.md", &read_text(&src(layout::ALIGNMENT))?)?;
    } else {
        e.miss("trends", &["alignment.md"])?;
    }

    let manifest = Manifest { seed: cfg.seed, artifacts: e.artifacts, missing: e.missing };
    io::write_json(&dir.join(MANIFEST), &manifest)?;
    println!("report: {} artifacts, {} missing entries in {}", manifest.artifacts.len(), manifest.missing.len(), dir.display());
    Ok(manifest)
}
