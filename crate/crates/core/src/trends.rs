//! Weekly binning of dominant topics, trend matrices and alignment with an
//! external event timeline.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus::CleanDocument;
use crate::time::Day;
use crate::{Error, Result};

/// `floor((day - origin) / 7)` for every document.
pub fn assign_weeks(docs: &[CleanDocument], origin: Day) -> Result<Vec<usize>> {
    docs.iter()
        .map(|d| {
            let delta = d.timestamp.day().0 - origin.0;
            if delta < 0 {
                Err(Error::BeforeOrigin { id: d.id.clone() })
            } else {
                Ok((delta / 7) as usize)
            }
        })
        .collect()
}

/// Week-by-topic counts and percentages. Weeks run contiguously from week 0
/// to the last populated week; a week with no documents has `None` in
/// `values` rather than a row of zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendMatrix {
    pub k: usize,
    pub origin: Day,
    pub week_starts: Vec<Day>,
    pub counts: Vec<Vec<u64>>,
    pub values: Vec<Option<Vec<f64>>>,
}

impl TrendMatrix {
    pub fn weeks(&self) -> usize {
        self.week_starts.len()
    }

    /// Week index containing `day`, if inside the matrix.
    pub fn week_of(&self, day: Day) -> Option<usize> {
        let delta = day.0 - self.origin.0;
        if delta < 0 {
            return None;
        }
        let w = (delta / 7) as usize;
        (w < self.weeks()).then_some(w)
    }

    /// Percentage series of topic `k`, one entry per week.
    pub fn series(&self, k: usize) -> Vec<Option<f64>> {
        self.values.iter().map(|row| row.as_ref().map(|r| r[k])).collect()
    }
}

/// Tallies dominant topics per week. `dominant[i]` and `weeks[i]` describe
/// document `i`.
pub fn topic_trend(dominant: &[usize], weeks: &[usize], k: usize, origin: Day) -> Result<TrendMatrix> {
    if dominant.len() != weeks.len() {
        return Err(Error::DimensionMismatch { expected: dominant.len(), got: weeks.len() });
    }
    if k == 0 {
        return Err(Error::invalid("trend needs at least one topic"));
    }
    let n_weeks = weeks.iter().max().map_or(0, |w| w + 1);
    let mut counts = vec![vec![0u64; k]; n_weeks];
    for (&t, &w) in dominant.iter().zip(weeks) {
        if t >= k {
            return Err(Error::invalid("dominant topic out of range"));
        }
        counts[w][t] += 1;
    }
    let values = counts
        .iter()
        .map(|row| {
            let total: u64 = row.iter().sum();
            (total > 0).then(|| row.iter().map(|&c| 100.0 * c as f64 / total as f64).collect())
        })
        .collect();
    let week_starts = (0..n_weeks).map(|w| origin.plus(7 * w as i64)).collect();
    Ok(TrendMatrix { k, origin, week_starts, counts, values })
}

/// Topic indices by descending weight, lowest index first on ties.
pub fn rank_topics<T: PartialOrd + Copy>(row: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..row.len()).collect();
    idx.sort_by(|&a, &b| row[b].partial_cmp(&row[a]).unwrap_or(core::cmp::Ordering::Equal).then(a.cmp(&b)));
    idx
}

/// Top-`m` topics of each week; `None` for empty weeks.
pub fn dominant_per_week(trend: &TrendMatrix, m: usize) -> Vec<Option<Vec<usize>>> {
    trend
        .values
        .iter()
        .map(|row| {
            row.as_ref().map(|r| {
                let mut ranked = rank_topics(r);
                ranked.truncate(m);
                ranked
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimelineEntry {
    pub start: Day,
    pub end: Day,
    pub description: String,
}

/// Dated events, sorted by start date.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EventTimeline {
    entries: Vec<TimelineEntry>,
}

impl EventTimeline {
    /// Sorts entries by start date (stable). Rejects an entry ending before it starts.
    pub fn new(mut entries: Vec<TimelineEntry>) -> Result<Self> {
        if let Some(e) = entries.iter().find(|e| e.end < e.start) {
            return Err(Error::invalid(format!("timeline entry '{}' ends before it starts", e.description)));
        }
        entries.sort_by_key(|e| e.start);
        Ok(EventTimeline { entries })
    }

    pub fn entries(&self) -> &[TimelineEntry] {
        &self.entries
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentRow {
    pub start: Day,
    pub end: Day,
    pub description: String,
    pub topics: Vec<usize>,
    pub themes: Vec<String>,
    /// The entry covers no populated week of the corpus.
    pub outside_range: bool,
}

/// Joins each timeline entry with the top-`m` topics of the weeks it
/// overlaps, ranked by counts summed over those weeks.
pub fn align_events(
    trend: &TrendMatrix,
    timeline: &EventTimeline,
    theme_names: &[String],
    m: usize,
) -> Result<Vec<AlignmentRow>> {
    if theme_names.len() != trend.k {
        return Err(Error::DimensionMismatch { expected: trend.k, got: theme_names.len() });
    }
    let rows = timeline
        .entries()
        .iter()
        .map(|e| {
            let mut sum = vec![0u64; trend.k];
            for (w, start) in trend.week_starts.iter().enumerate() {
                if start.0 <= e.end.0 && start.0 + 6 >= e.start.0 {
                    for (s, c) in sum.iter_mut().zip(&trend.counts[w]) {
                        *s += c;
                    }
                }
            }
            let outside_range = sum.iter().all(|&c| c == 0);
            let topics = if outside_range {
                Vec::new()
            } else {
                let mut r = rank_topics(&sum);
                r.truncate(m);
                r
            };
            AlignmentRow {
                start: e.start,
                end: e.end,
                description: e.description.clone(),
                themes: topics.iter().map(|&t| theme_names[t].clone()).collect(),
                topics,
                outside_range,
            }
        })
        .collect();
    Ok(rows)
}

/// `Topic 1` .. `Topic k`.
pub fn default_theme_names(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("Topic {i}")).collect()
}

fn md_cell(s: &str) -> String {
    s.replace('|', "\\|").replace('\n', " ")
}

/// Markdown table with one row per timeline entry.
pub fn alignment_markdown(rows: &[AlignmentRow]) -> String {
    let mut out = String::from("| Period | Prominent event | Trending topics |\n|---|---|---|\n");
    for r in rows {
        let themes = if r.outside_range { String::from("(outside corpus range)") } else { r.themes.join(", ") };
        out.push_str(&format!(
            "| {} to {} | {} | {} |\n",
            r.start,
            r.end,
            md_cell(&r.description),
            md_cell(&themes)
        ));
    }
    out
}
