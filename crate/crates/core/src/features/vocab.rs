use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::SparseVector;
use crate::corpus::CleanDocument;
use crate::fingerprint::Fingerprinter;
use crate::{Error, Result};

/// Term index with document frequencies. Terms are indexed lexicographically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VocabularyFile", into = "VocabularyFile")]
pub struct Vocabulary {
    terms: Vec<String>,
    doc_freq: Vec<u32>,
    n_docs: usize,
    index: BTreeMap<String, u32>,
}

/// Serialized form: `terms` in index order, `doc_freq`, `n_docs`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VocabularyFile {
    pub terms: Vec<String>,
    pub doc_freq: Vec<u32>,
    pub n_docs: usize,
}

impl TryFrom<VocabularyFile> for Vocabulary {
    type Error = Error;

    fn try_from(f: VocabularyFile) -> Result<Self> {
        Vocabulary::from_parts(f.terms, f.doc_freq, f.n_docs)
    }
}

impl From<Vocabulary> for VocabularyFile {
    fn from(v: Vocabulary) -> Self {
        VocabularyFile { terms: v.terms, doc_freq: v.doc_freq, n_docs: v.n_docs }
    }
}

impl Vocabulary {
    /// Rebuilds a vocabulary from its serialized parts, checking invariants.
    pub fn from_parts(terms: Vec<String>, doc_freq: Vec<u32>, n_docs: usize) -> Result<Self> {
        if terms.len() != doc_freq.len() {
            return Err(Error::DimensionMismatch { expected: terms.len(), got: doc_freq.len() });
        }
        if terms.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("vocabulary terms must be strictly sorted"));
        }
        if doc_freq.iter().any(|&d| d == 0 || d as usize > n_docs) {
            return Err(Error::invalid("document frequency outside 1..=n_docs"));
        }
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        Ok(Vocabulary { terms, doc_freq, n_docs, index })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn doc_freqs(&self) -> &[u32] {
        &self.doc_freq
    }

    pub fn index_of(&self, term: &str) -> Option<u32> {
        self.index.get(term).copied()
    }

    pub fn term(&self, index: usize) -> &str {
        &self.terms[index]
    }

    pub fn doc_freq(&self, index: usize) -> u32 {
        self.doc_freq[index]
    }

    /// Maps a token list onto vocabulary ids, dropping out-of-vocabulary tokens.
    pub fn encode(&self, tokens: &[String]) -> Vec<u32> {
        tokens.iter().filter_map(|t| self.index_of(t)).collect()
    }

    pub fn fingerprint(&self) -> String {
        let mut f = Fingerprinter::default();
        f.u64(self.n_docs as u64);
        for (t, d) in self.terms.iter().zip(&self.doc_freq) {
            f.bytes(t.as_bytes()).u64(*d as u64);
        }
        f.finish()
    }
}

/// Keeps terms with `min_df <= df <= max_df_ratio * n_docs`.
pub fn build_vocabulary(docs: &[CleanDocument], min_df: usize, max_df_ratio: f64) -> Result<Vocabulary> {
    if docs.is_empty() {
        return Err(Error::Empty("no documents to build a vocabulary from".into()));
    }
    if !(max_df_ratio > 0.0 && max_df_ratio <= 1.0) {
        return Err(Error::invalid("max_df_ratio must lie in (0, 1]"));
    }
    let mut df: BTreeMap<&str, u32> = BTreeMap::new();
    let mut seen: Vec<&str> = Vec::new();
    for d in docs {
        seen.clear();
        seen.extend(d.tokens.iter().map(|s| s.as_str()));
        seen.sort_unstable();
        seen.dedup();
        for t in &seen {
            *df.entry(t).or_insert(0) += 1;
        }
    }
    let max_df = max_df_ratio * docs.len() as f64;
    let (terms, doc_freq): (Vec<String>, Vec<u32>) = df
        .into_iter()
        .filter(|&(_, d)| d as usize >= min_df && d as f64 <= max_df + 1e-9)
        .map(|(t, d)| (String::from(t), d))
        .unzip();
    if terms.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    Vocabulary::from_parts(terms, doc_freq, docs.len())
}

/// Smoothed inverse document frequency `ln((1 + N) / (1 + df)) + 1`.
pub fn idf(n_docs: usize, doc_freq: u32) -> f64 {
    libm::log((1.0 + n_docs as f64) / (1.0 + doc_freq as f64)) + 1.0
}

/// Raw term counts times idf, L2-normalized. Out-of-vocabulary tokens are ignored.
pub fn tfidf_vectorize(tokens: &[String], vocab: &Vocabulary) -> SparseVector {
    let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
    for id in vocab.encode(tokens) {
        *counts.entry(id).or_insert(0) += 1;
    }
    let mut entries: Vec<(u32, f64)> = counts
        .into_iter()
        .map(|(i, c)| (i, c as f64 * idf(vocab.n_docs, vocab.doc_freq[i as usize])))
        .collect();
    let norm = libm::sqrt(entries.iter().map(|e| e.1 * e.1).sum());
    if norm > 0.0 {
        for e in &mut entries {
            e.1 /= norm;
        }
    }
    SparseVector::from_pairs(vocab.len(), entries).unwrap_or_else(|_| SparseVector::empty(vocab.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::Timestamp;
    use alloc::vec;
    use alloc::string::ToString;

    fn docs(lists: &[&[&str]]) -> Vec<CleanDocument> {
        lists
            .iter()
            .enumerate()
            .map(|(i, t)| CleanDocument::new(i, t, Timestamp(0)))
            .collect()
    }

    #[test]
    fn counts_and_order() {
        let v = build_vocabulary(&docs(&[&["b", "a", "b"], &["b", "c"]]), 1, 1.0).unwrap();
        assert_eq!(v.terms(), &["a".to_string(), "b".into(), "c".into()]);
        assert_eq!(v.doc_freqs(), &[1, 2, 1]);
        assert_eq!(v.n_docs(), 2);
    }

    #[test]
    fn min_df_filter() {
        let v = build_vocabulary(&docs(&[&["a", "b"], &["b", "c"]]), 2, 1.0).unwrap();
        assert_eq!(v.terms(), &["b".to_string()]);
    }

    #[test]
    fn max_df_filter() {
        let mut lists: Vec<Vec<&str>> = (0..100).map(|_| vec!["the"]).collect();
        for l in lists.iter_mut().take(10) {
            l.push("rare");
        }
        let refs: Vec<&[&str]> = lists.iter().map(|l| l.as_slice()).collect();
        let v = build_vocabulary(&docs(&refs), 1, 0.9).unwrap();
        assert_eq!(v.terms(), &["rare".to_string()]);
    }

    #[test]
    fn empty_vocabulary_error() {
        assert_eq!(build_vocabulary(&docs(&[&["a"]]), 2, 1.0), Err(Error::EmptyVocabulary));
        assert!(build_vocabulary(&[], 1, 1.0).is_err());
        assert!(build_vocabulary(&docs(&[&["a"]]), 1, 0.0).is_err());
    }

    #[test]
    fn single_doc_tfidf() {
        let d = docs(&[&["x", "x"]]);
        let v = build_vocabulary(&d, 1, 1.0).unwrap();
        assert_eq!(idf(1, 1), 1.0);
        let s = tfidf_vectorize(&d[0].tokens, &v);
        assert_eq!(s.entries(), &[(0, 1.0)]);
    }

    #[test]
    fn oov_doc_is_empty() {
        let v = build_vocabulary(&docs(&[&["x"]]), 1, 1.0).unwrap();
        let s = tfidf_vectorize(&["y".to_string()], &v);
        assert!(s.is_empty());
        assert_eq!(s.dim(), 1);
    }

    #[test]
    fn rarer_term_larger_idf() {
        // ln(5/2) + 1 vs ln(5/5) + 1
        assert!((idf(4, 1) - (libm::log(2.5) + 1.0)).abs() < 1e-15);
        assert_eq!(idf(4, 4), 1.0);
        assert!(idf(4, 1) > idf(4, 4));
    }

    #[test]
    fn fingerprint_stable_and_sensitive() {
        let d = docs(&[&["a", "b"], &["b", "c"]]);
        let a = build_vocabulary(&d, 1, 1.0).unwrap();
        let b = build_vocabulary(&d, 1, 1.0).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        let c = build_vocabulary(&d, 2, 1.0).unwrap();
        assert_ne!(a.fingerprint(), c.fingerprint());
    }

    #[test]
    fn from_parts_validates() {
        assert!(Vocabulary::from_parts(vec!["b".into(), "a".into()], vec![1, 1], 1).is_err());
        assert!(Vocabulary::from_parts(vec!["a".into()], vec![3], 2).is_err());
        let v = Vocabulary::from_parts(vec!["a".into(), "b".into()], vec![1, 2], 2).unwrap();
        assert_eq!(v.index_of("b"), Some(1));
    }
}
