//! File formats: raw and cleaned corpora, embeddings, timelines, JSON and CSV
//! artifacts.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDate, SecondsFormat, Utc};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use topictrace_core::corpus::{CleanDocument, Label, RawDocument};
use topictrace_core::time::{Day, Timestamp};
use topictrace_core::trends::{EventTimeline, TimelineEntry, TrendMatrix};

use crate::error::{CliError, CliResult};

pub fn parse_day(s: &str) -> Option<Day> {
    let d = NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d").ok()?;
    let secs = d.and_hms_opt(0, 0, 0)?.and_utc().timestamp();
    Some(Timestamp(secs).day())
}

pub fn parse_timestamp(s: &str) -> Option<Timestamp> {
    DateTime::parse_from_rfc3339(s.trim()).ok().map(|t| Timestamp(t.timestamp()))
}

pub fn format_timestamp(ts: Timestamp) -> String {
    DateTime::<Utc>::from_timestamp(ts.0, 0)
        .map(|t| t.to_rfc3339_opts(SecondsFormat::Secs, true))
        .unwrap_or_else(|| ts.0.to_string())
}

#[derive(Debug, Deserialize)]
struct RawRecord {
    id: Option<String>,
    text: Option<String>,
    ts: Option<String>,
    #[serde(default)]
    label: Option<String>,
}

fn to_raw(rec: RawRecord, path: &Path, line: usize) -> CliResult<RawDocument> {
    let bad = |msg: &str| CliError::data(path, format!("line {line}: {msg}"));
    let id = rec.id.filter(|s| !s.is_empty()).ok_or_else(|| bad("missing id"))?;
    let text = rec.text.ok_or_else(|| bad("missing text"))?;
    let ts = rec.ts.ok_or_else(|| bad("missing ts"))?;
    let timestamp = parse_timestamp(&ts).ok_or_else(|| bad(&format!("ts '{ts}' is not RFC 3339")))?;
    let label = match rec.label.as_deref().map(str::trim) {
        None | Some("") => None,
        Some(l) => Some(Label::parse(l).ok_or_else(|| bad(&format!("unknown label '{l}'")))?),
    };
    Ok(RawDocument { id, text, timestamp, label })
}

/// Reads a raw corpus. Files ending in `.csv` are CSV with header
/// `id,text,ts,label`; anything else is JSONL.
pub fn load_corpus(path: &Path) -> CliResult<Vec<RawDocument>> {
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let docs = if is_csv { load_csv(path)? } else { load_jsonl(path)? };
    let mut seen = BTreeSet::new();
    for d in &docs {
        if !seen.insert(d.id.as_str()) {
            return Err(CliError::data(path, format!("duplicate id {}", d.id)));
        }
    }
    Ok(docs)
}

fn load_jsonl(path: &Path) -> CliResult<Vec<RawDocument>> {
    let file = fs::File::open(path).map_err(CliError::io(path))?;
    let mut docs = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(CliError::io(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: RawRecord =
            serde_json::from_str(&line).map_err(|e| CliError::data(path, format!("line {}: {e}", i + 1)))?;
        docs.push(to_raw(rec, path, i + 1)?);
    }
    Ok(docs)
}

fn load_csv(path: &Path) -> CliResult<Vec<RawDocument>> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|e| CliError::data(path, e))?;
    let mut docs = Vec::new();
    for rec in reader.deserialize::<RawRecord>() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::data(path, format!("line {line}: {e}"))
        })?;
        let line = docs.len() + 2;
        docs.push(to_raw(rec, path, line)?);
    }
    Ok(docs)
}

/// Raw corpus as JSONL: `{"id", "text", "ts", "label"?}` per line.
pub fn write_raw(path: &Path, docs: &[RawDocument]) -> CliResult<()> {
    #[derive(Serialize)]
    struct Rec<'a> {
        id: &'a str,
        text: &'a str,
        ts: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        label: Option<&'static str>,
    }
    let mut out = String::new();
    for d in docs {
        let rec = Rec { id: &d.id, text: &d.text, ts: format_timestamp(d.timestamp), label: d.label.map(Label::as_str) };
        out.push_str(&serde_json::to_string(&rec).expect("serializable"));
        out.push('\n');
    }
    write_text(path, &out)
}

pub fn load_term_list(path: &Path) -> CliResult<BTreeSet<String>> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    Ok(topictrace_core::corpus::parse_term_list(&text))
}

#[derive(Debug, Serialize, Deserialize)]
struct CleanRecord {
    id: String,
    tokens: Vec<String>,
    ts: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<Label>,
}

pub fn write_clean(path: &Path, docs: &[CleanDocument]) -> CliResult<()> {
    let mut out = String::new();
    for d in docs {
        let rec = CleanRecord { id: d.id.clone(), tokens: d.tokens.clone(), ts: format_timestamp(d.timestamp), label: d.label };
        out.push_str(&serde_json::to_string(&rec).expect("serializable"));
        out.push('\n');
    }
    write_text(path, &out)
}

pub fn read_clean(path: &Path) -> CliResult<Vec<CleanDocument>> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let rec: CleanRecord = serde_json::from_str(l).map_err(|e| CliError::data(path, format!("line {}: {e}", i + 1)))?;
            let timestamp = parse_timestamp(&rec.ts)
                .ok_or_else(|| CliError::data(path, format!("line {}: bad ts '{}'", i + 1, rec.ts)))?;
            Ok(CleanDocument { id: rec.id, tokens: rec.tokens, timestamp, label: rec.label })
        })
        .collect()
}

/// Precomputed document embeddings keyed by id.
#[derive(Debug, Clone, PartialEq)]
pub struct Embeddings {
    pub dim: usize,
    pub vectors: BTreeMap<String, Vec<f64>>,
}

impl Embeddings {
    /// Vectors for `ids` in order; an id without a vector is a data error.
    pub fn lookup<'a>(&self, ids: impl IntoIterator<Item = &'a str>) -> CliResult<Vec<Vec<f64>>> {
        ids.into_iter()
            .map(|id| {
                self.vectors
                    .get(id)
                    .cloned()
                    .ok_or_else(|| CliError::Data(format!("no embedding for document {id}")))
            })
            .collect()
    }

    /// Ids with a vector but absent from `known`.
    pub fn unknown_ids(&self, known: &BTreeSet<&str>) -> Vec<String> {
        self.vectors.keys().filter(|k| !known.contains(k.as_str())).cloned().collect()
    }
}

/// Header `dim=<d>`, then `<id>\t<w1> <w2> ... <wd>` per line.
pub fn load_embeddings(path: &Path) -> CliResult<Embeddings> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| CliError::data(path, "empty embedding file"))?;
    let dim: usize = header
        .trim()
        .strip_prefix("dim=")
        .and_then(|d| d.trim().parse().ok())
        .filter(|&d| d > 0)
        .ok_or_else(|| CliError::data(path, "line 1: expected header dim=<d>"))?;
    let mut vectors = BTreeMap::new();
    for (i, line) in lines {
        let bad = |msg: String| CliError::data(path, format!("line {}: {msg}", i + 1));
        let (id, rest) = line.split_once('\t').ok_or_else(|| bad("expected <id>\\t<values>".into()))?;
        let v = rest
            .split_whitespace()
            .map(|x| x.parse::<f64>().ok().filter(|f| f.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| bad("non-numeric value".into()))?;
        if v.len() != dim {
            return Err(CliError::Core(topictrace_core::Error::DimensionMismatch { expected: dim, got: v.len() }));
        }
        if vectors.insert(id.to_string(), v).is_some() {
            return Err(bad(format!("duplicate id {id}")));
        }
    }
    Ok(Embeddings { dim, vectors })
}

#[derive(Debug, Serialize, Deserialize)]
struct TimelineRecord {
    start: String,
    end: String,
    description: String,
}

pub fn load_timeline(path: &Path) -> CliResult<EventTimeline> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    let recs: Vec<TimelineRecord> = serde_json::from_str(&text).map_err(|e| CliError::data(path, e))?;
    let entries = recs
        .into_iter()
        .map(|r| {
            let day = |s: &str| parse_day(s).ok_or_else(|| CliError::data(path, format!("bad date '{s}'")));
            Ok(TimelineEntry { start: day(&r.start)?, end: day(&r.end)?, description: r.description })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(EventTimeline::new(entries)?)
}

pub fn write_timeline(path: &Path, timeline: &EventTimeline) -> CliResult<()> {
    let recs: Vec<TimelineRecord> = timeline
        .entries()
        .iter()
        .map(|e| TimelineRecord { start: e.start.to_string(), end: e.end.to_string(), description: e.description.clone() })
        .collect();
    write_json(path, &recs)
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    let mut f = fs::File::create(path).map_err(CliError::io(path))?;
    f.write_all(text.as_bytes()).map_err(CliError::io(path))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> CliResult<()> {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    write_text(path, &s)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    serde_json::from_str(&text).map_err(|e| CliError::data(path, e))
}

/// Serializes rows with the csv crate into a string.
pub fn csv_string<I, R>(header: &[String], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r.into_iter().collect::<Vec<_>>()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// `week_start,topic_0,...` with percentages to one decimal; empty weeks
/// have blank cells.
pub fn trend_csv(trend: &TrendMatrix) -> String {
    let header = trend_header(trend.k);
    let rows = trend.week_starts.iter().zip(&trend.values).map(|(w, row)| {
        std::iter::once(w.to_string()).chain((0..trend.k).map(|k| match row {
            Some(r) => format!("{:.1}", r[k]),
            None => String::new(),
        }))
    });
    csv_string(&header, rows)
}

pub fn trend_counts_csv(trend: &TrendMatrix) -> String {
    let header = trend_header(trend.k);
    let rows = trend
        .week_starts
        .iter()
        .zip(&trend.counts)
        .map(|(w, row)| std::iter::once(w.to_string()).chain(row.iter().map(|c| c.to_string())));
    csv_string(&header, rows)
}

fn trend_header(k: usize) -> Vec<String> {
    std::iter::once("week_start".to_string()).chain((0..k).map(|i| format!("topic_{i}"))).collect()
}
