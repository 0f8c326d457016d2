use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::lda::{top_ids, LdaModel};
use crate::features::Vocabulary;
use crate::{Error, Result};

const EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoherenceMeasure {
    Umass,
    Npmi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coherence {
    pub per_topic: Vec<f64>,
    pub mean: f64,
}

impl Coherence {
    fn from_scores(per_topic: Vec<f64>) -> Self {
        let mean = per_topic.iter().sum::<f64>() / per_topic.len() as f64;
        Coherence { per_topic, mean }
    }
}

/// Occurrence and co-occurrence counts over a small set of words, where each
/// "context" (document or window) counts at most once.
struct Cooccurrence {
    single: Vec<u64>,
    pair: Vec<u64>,
    contexts: u64,
    m: usize,
}

impl Cooccurrence {
    fn new(m: usize) -> Self {
        Cooccurrence { single: vec![0; m], pair: vec![0; m * m], contexts: 0, m }
    }

    fn add(&mut self, present: &[usize]) {
        self.contexts += 1;
        for (a, &i) in present.iter().enumerate() {
            self.single[i] += 1;
            for &j in &present[..a] {
                self.pair[i * self.m + j] += 1;
                self.pair[j * self.m + i] += 1;
            }
        }
    }

    fn pair(&self, i: usize, j: usize) -> u64 {
        self.pair[i * self.m + j]
    }
}

type LocalWords = (Vec<Vec<usize>>, Vec<Option<usize>>, usize);

/// Top-word lists per topic, as positions in a deduplicated local word list,
/// plus a map from vocabulary id to that position.
fn local_words(model: &LdaModel, vocab: &Vocabulary, top_n: usize) -> Result<LocalWords> {
    if top_n == 0 {
        return Err(Error::invalid("top_n must be positive"));
    }
    let mut local = vec![None; model.n_terms];
    let mut m = 0;
    let mut lists = Vec::with_capacity(model.k);
    for k in 0..model.k {
        let ids = top_ids(model, vocab, k, top_n)?;
        lists.push(
            ids.into_iter()
                .map(|w| {
                    *local[w].get_or_insert_with(|| {
                        m += 1;
                        m - 1
                    })
                })
                .collect(),
        );
    }
    Ok((lists, local, m))
}

fn present_in(tokens: &[u32], local: &[Option<usize>], seen: &mut [bool], out: &mut Vec<usize>) -> Result<()> {
    out.clear();
    for &w in tokens {
        let slot = local.get(w as usize).ok_or(Error::DimensionMismatch { expected: local.len(), got: w as usize + 1 })?;
        if let Some(i) = *slot {
            if !seen[i] {
                seen[i] = true;
                out.push(i);
            }
        }
    }
    for &i in out.iter() {
        seen[i] = false;
    }
    Ok(())
}

/// UMass coherence over document co-occurrence in `docs`:
/// `sum_{i>j} ln((D(w_i, w_j) + 1) / D(w_j))` with words in phi order.
pub fn umass_coherence(model: &LdaModel, vocab: &Vocabulary, docs: &[Vec<u32>], top_n: usize) -> Result<Coherence> {
    let (lists, local, m) = local_words(model, vocab, top_n)?;
    let mut co = Cooccurrence::new(m);
    let mut seen = vec![false; m];
    let mut present = Vec::new();
    for doc in docs {
        present_in(doc, &local, &mut seen, &mut present)?;
        co.add(&present);
    }
    let mut scores = Vec::with_capacity(lists.len());
    for words in &lists {
        let mut s = 0.0;
        for i in 1..words.len() {
            for j in 0..i {
                let dj = co.single[words[j]];
                if dj == 0 {
                    return Err(Error::Numeric("top word never occurs in the reference corpus".into()));
                }
                s += libm::log((co.pair(words[i], words[j]) as f64 + 1.0) / dj as f64);
            }
        }
        scores.push(s);
    }
    Ok(Coherence::from_scores(scores))
}

/// Mean NPMI over top-word pairs, with probabilities from boolean sliding
/// windows of `window` tokens. A document shorter than the window is one
/// window. Pairs that co-occur in every window score 1.
pub fn npmi_coherence(
    model: &LdaModel,
    vocab: &Vocabulary,
    docs: &[Vec<u32>],
    top_n: usize,
    window: usize,
) -> Result<Coherence> {
    if window == 0 {
        return Err(Error::invalid("window must be positive"));
    }
    let (lists, local, m) = local_words(model, vocab, top_n)?;
    let mut co = Cooccurrence::new(m);
    let mut seen = vec![false; m];
    let mut present = Vec::new();
    for doc in docs {
        if doc.is_empty() {
            continue;
        }
        let n_windows = doc.len().saturating_sub(window) + 1;
        for s in 0..n_windows {
            present_in(&doc[s..(s + window).min(doc.len())], &local, &mut seen, &mut present)?;
            co.add(&present);
        }
    }
    if co.contexts == 0 {
        return Err(Error::Empty("no windows in the reference corpus".into()));
    }
    let n = co.contexts as f64;
    let mut scores = Vec::with_capacity(lists.len());
    for words in &lists {
        let mut s = 0.0;
        let mut pairs = 0usize;
        for i in 1..words.len() {
            for j in 0..i {
                let pij = co.pair(words[i], words[j]) as f64 / n;
                let pi = co.single[words[i]] as f64 / n;
                let pj = co.single[words[j]] as f64 / n;
                s += npmi(pij, pi, pj);
                pairs += 1;
            }
        }
        scores.push(if pairs == 0 { 0.0 } else { s / pairs as f64 });
    }
    Ok(Coherence::from_scores(scores))
}

fn npmi(pij: f64, pi: f64, pj: f64) -> f64 {
    if pij >= 1.0 {
        return 1.0;
    }
    let joint = pij + EPS;
    libm::log(joint / (pi * pj + EPS)) / -libm::log(joint)
}
