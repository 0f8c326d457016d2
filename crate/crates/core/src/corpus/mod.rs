//! Document ingestion types and the preprocessing pipeline:
//! normalize → tokenize → remove stopwords → stem, then deduplicate.

mod normalize;
mod porter;
mod tokenize;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::time::Timestamp;

pub use normalize::normalize;
pub use porter::stem;
pub use tokenize::tokenize;

/// Bundled English stoplist, one term per line with `#` comments.
pub const BUNDLED_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");
/// Default collection keywords.
pub const BUNDLED_KEYWORDS: &str = include_str!("../../data/keywords.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Irrelevant,
    Relevant,
}

impl Label {
    /// Class index used by the classifiers: Irrelevant = 0, Relevant = 1.
    pub fn index(self) -> usize {
        match self {
            Label::Irrelevant => 0,
            Label::Relevant => 1,
        }
    }

    pub fn from_index(i: usize) -> Label {
        if i == 1 {
            Label::Relevant
        } else {
            Label::Irrelevant
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Irrelevant => "irrelevant",
            Label::Relevant => "relevant",
        }
    }

    /// Case-insensitive parse of `relevant` / `irrelevant`.
    pub fn parse(s: &str) -> Option<Label> {
        if s.eq_ignore_ascii_case("relevant") {
            Some(Label::Relevant)
        } else if s.eq_ignore_ascii_case("irrelevant") {
            Some(Label::Irrelevant)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawDocument {
    pub id: String,
    pub text: String,
    pub timestamp: Timestamp,
    pub label: Option<Label>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleanDocument {
    pub id: String,
    pub tokens: Vec<String>,
    pub timestamp: Timestamp,
    pub label: Option<Label>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessConfig {
    pub stopwords: BTreeSet<String>,
    pub collection_keywords: BTreeSet<String>,
    pub strip_urls: bool,
    pub strip_mentions_hashmarks: bool,
    pub strip_non_ascii: bool,
    pub min_tokens: usize,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            stopwords: parse_term_list(BUNDLED_STOPWORDS),
            collection_keywords: parse_term_list(BUNDLED_KEYWORDS),
            strip_urls: true,
            strip_mentions_hashmarks: true,
            strip_non_ascii: true,
            min_tokens: 1,
        }
    }
}

impl PreprocessConfig {
    /// Defaults with a caller-supplied stoplist and keyword set. Both are
    /// lowercased.
    pub fn with_lists<S: AsRef<str>>(
        stopwords: impl IntoIterator<Item = S>,
        keywords: impl IntoIterator<Item = S>,
    ) -> Self {
        PreprocessConfig {
            stopwords: stopwords.into_iter().map(|s| s.as_ref().to_lowercase()).collect(),
            collection_keywords: keywords.into_iter().map(|s| s.as_ref().to_lowercase()).collect(),
            ..PreprocessConfig::default()
        }
    }
}

/// Parses a one-term-per-line list. Blank lines and `#` comments are skipped;
/// terms are trimmed and lowercased.
pub fn parse_term_list(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| l.to_lowercase())
        .collect()
}

/// Drops every token that is in `stoplist`, preserving order.
pub fn remove_stopwords(tokens: Vec<String>, stoplist: &BTreeSet<String>) -> Vec<String> {
    tokens.into_iter().filter(|t| !stoplist.contains(t)).collect()
}

/// Token list for a raw text, without the `min_tokens` check.
pub fn clean_tokens(text: &str, config: &PreprocessConfig) -> Vec<String> {
    let normalized = normalize(text, config);
    let tokens = remove_stopwords(tokenize(&normalized), &config.stopwords);
    tokens.iter().map(|t| stem(t)).collect()
}

/// Runs the full pipeline on one document. Returns `None` when fewer than
/// `min_tokens` tokens survive.
pub fn preprocess(raw: &RawDocument, config: &PreprocessConfig) -> Option<CleanDocument> {
    let tokens = clean_tokens(&raw.text, config);
    if tokens.len() < config.min_tokens.max(1) {
        return None;
    }
    Some(CleanDocument {
        id: raw.id.clone(),
        tokens,
        timestamp: raw.timestamp,
        label: raw.label,
    })
}

/// Bookkeeping from a preprocessing run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessStats {
    pub total: usize,
    pub empty: usize,
    pub duplicates: usize,
    pub unique: usize,
    pub relevant: usize,
    pub irrelevant: usize,
    pub unlabeled: usize,
}

impl PreprocessStats {
    pub fn dropped(&self) -> usize {
        self.empty + self.duplicates
    }
}

/// Removes documents shorter than `min_tokens` and collapses identical token
/// sequences onto their earliest-timestamp instance (first in input order on
/// a tie). Survivors keep their relative order.
pub fn deduplicate(docs: Vec<CleanDocument>, min_tokens: usize) -> Vec<CleanDocument> {
    let mut winner: BTreeMap<&[String], usize> = BTreeMap::new();
    for (i, d) in docs.iter().enumerate() {
        if d.tokens.len() < min_tokens {
            continue;
        }
        winner
            .entry(d.tokens.as_slice())
            .and_modify(|w| {
                if d.timestamp < docs[*w].timestamp {
                    *w = i;
                }
            })
            .or_insert(i);
    }
    let keep: BTreeSet<usize> = winner.into_values().collect();
    docs.into_iter()
        .enumerate()
        .filter(|(i, _)| keep.contains(i))
        .map(|(_, d)| d)
        .collect()
}

/// Preprocess a whole corpus, then deduplicate. Output order follows input order.
pub fn preprocess_corpus(
    raw: &[RawDocument],
    config: &PreprocessConfig,
) -> (Vec<CleanDocument>, PreprocessStats) {
    let cleaned: Vec<CleanDocument> = raw.iter().filter_map(|r| preprocess(r, config)).collect();
    finish_corpus(raw.len(), cleaned, config.min_tokens)
}

/// Dedup and statistics for documents already passed through [`preprocess`]
/// (possibly in parallel). `total` is the raw document count.
pub fn finish_corpus(
    total: usize,
    cleaned: Vec<CleanDocument>,
    min_tokens: usize,
) -> (Vec<CleanDocument>, PreprocessStats) {
    let empty = total - cleaned.len();
    let before = cleaned.len();
    let docs = deduplicate(cleaned, min_tokens.max(1));
    let mut stats = PreprocessStats {
        total,
        empty,
        duplicates: before - docs.len(),
        unique: docs.len(),
        ..Default::default()
    };
    for d in &docs {
        match d.label {
            Some(Label::Relevant) => stats.relevant += 1,
            Some(Label::Irrelevant) => stats.irrelevant += 1,
            None => stats.unlabeled += 1,
        }
    }
    (docs, stats)
}

impl CleanDocument {
    pub fn new(id: impl ToString, tokens: &[&str], timestamp: Timestamp) -> Self {
        CleanDocument {
            id: id.to_string(),
            tokens: tokens.iter().map(|t| t.to_string()).collect(),
            timestamp,
            label: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn raw(id: &str, text: &str) -> RawDocument {
        RawDocument { id: id.into(), text: text.into(), timestamp: Timestamp(0), label: None }
    }

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn bundled_lists_parse() {
        let cfg = PreprocessConfig::default();
        assert_eq!(cfg.stopwords.len(), 187);
        assert!(cfg.stopwords.contains("n't"));
        assert_eq!(
            cfg.collection_keywords,
            ["coronavirus", "covid-19", "sars-ncov"].iter().map(|s| s.to_string()).collect()
        );
    }

    #[test]
    fn stopword_removal_with_bundled_list() {
        let cfg = PreprocessConfig::default();
        let out = remove_stopwords(strings(&["the", "virus", "is", "here"]), &cfg.stopwords);
        assert_eq!(out, strings(&["virus"]));
        assert!(remove_stopwords(vec![], &cfg.stopwords).is_empty());
        assert!(remove_stopwords(strings(&["the", "is", "a"]), &cfg.stopwords).is_empty());
    }

    #[test]
    fn table_one_relevant_example() {
        let cfg = PreprocessConfig::default();
        let doc = preprocess(
            &raw("t", "coronavirus live updates: cases up nearly 60% as airports expand screenings: ny times -"),
            &cfg,
        )
        .unwrap();
        // Hand trace: keyword, "up" and "as" dropped; Porter stems applied.
        assert_eq!(
            doc.tokens,
            strings(&["live", "updat", "case", "nearli", "60", "airport", "expand", "screen", "ny", "time"])
        );
    }

    #[test]
    fn empty_and_stopword_only_documents_are_absent() {
        let cfg = PreprocessConfig::default();
        assert!(preprocess(&raw("a", "   \t "), &cfg).is_none());
        assert!(preprocess(&raw("b", "The"), &cfg).is_none());
        assert!(preprocess(&raw("c", "COVID-19 coronavirus"), &cfg).is_none());
    }

    #[test]
    fn min_tokens_threshold() {
        let cfg = PreprocessConfig { min_tokens: 3, ..Default::default() };
        assert!(preprocess(&raw("a", "masks work"), &cfg).is_none());
        assert!(preprocess(&raw("b", "masks work well"), &cfg).is_some());
    }

    #[test]
    fn dedup_keeps_earliest() {
        let mut a = CleanDocument::new("late", &["x", "y"], Timestamp(100));
        a.label = Some(Label::Relevant);
        let b = CleanDocument::new("early", &["x", "y"], Timestamp(50));
        let c = CleanDocument::new("other", &["z"], Timestamp(10));
        let d = CleanDocument::new("empty", &[], Timestamp(0));
        let out = deduplicate(vec![a, c, b, d], 1);
        let ids: Vec<&str> = out.iter().map(|d| d.id.as_str()).collect();
        assert_eq!(ids, vec!["other", "early"]);
    }

    #[test]
    fn dedup_tie_prefers_first() {
        let a = CleanDocument::new("first", &["x"], Timestamp(5));
        let b = CleanDocument::new("second", &["x"], Timestamp(5));
        let out = deduplicate(vec![a, b], 1);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].id, "first");
    }

    #[test]
    fn corpus_stats_count_duplicates_and_empties() {
        let cfg = PreprocessConfig::default();
        let docs = vec![
            raw("1", "Masks help https://t.co/a"),
            raw("2", "masks help https://t.co/b"),
            raw("3", "the"),
            raw("4", "testing capacity grows"),
        ];
        let (out, stats) = preprocess_corpus(&docs, &cfg);
        assert_eq!(out.len(), 2);
        assert_eq!(stats.total, 4);
        assert_eq!(stats.empty, 1);
        assert_eq!(stats.duplicates, 1);
        assert_eq!(stats.unique, 2);
        assert_eq!(stats.dropped(), 2);
    }
}
