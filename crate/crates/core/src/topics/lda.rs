use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::features::Vocabulary;
use crate::rng::Rng;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaParams {
    pub k: usize,
    /// Symmetric document-topic prior. `None` means `50 / k`.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    /// Post-burn-in sweeps between averaged samples.
    pub thin: usize,
    /// Sweeps between log-likelihood checkpoints. The initial random state is
    /// always the first checkpoint.
    pub checkpoint_every: usize,
    pub seed: u64,
}

impl LdaParams {
    pub fn new(k: usize, seed: u64) -> Self {
        LdaParams { k, alpha: None, beta: 0.01, iterations: 1000, burn_in: 500, thin: 10, checkpoint_every: 10, seed }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(50.0 / self.k as f64)
    }

    fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::invalid("LDA needs k >= 2"));
        }
        if !(self.alpha() > 0.0 && self.beta > 0.0) || !self.alpha().is_finite() || !self.beta.is_finite() {
            return Err(Error::invalid("alpha and beta must be positive"));
        }
        if self.iterations <= self.burn_in {
            return Err(Error::invalid("iterations must exceed burn_in"));
        }
        if self.thin == 0 || self.checkpoint_every == 0 {
            return Err(Error::invalid("thin and checkpoint_every must be positive"));
        }
        Ok(())
    }
}

/// A fitted topic model. `phi` is row-major `k x v`.
///
/// The count tables are kept for inspection but not serialized; inference
/// on new documents only needs `phi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaModel {
    #[serde(rename = "K")]
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub vocab_fingerprint: String,
    pub n_terms: usize,
    pub phi: Vec<f64>,
    pub seed: u64,
    pub iterations: usize,
    #[serde(default)]
    pub log_likelihood_trace: Vec<f64>,
    #[serde(skip)]
    pub n_wk: Vec<u32>,
    #[serde(skip)]
    pub n_k: Vec<u32>,
}

impl LdaModel {
    pub fn phi_row(&self, k: usize) -> &[f64] {
        &self.phi[k * self.n_terms..(k + 1) * self.n_terms]
    }

    pub fn check(&self) -> Result<()> {
        if self.k < 2 || self.phi.len() != self.k * self.n_terms {
            return Err(Error::DimensionMismatch { expected: self.k * self.n_terms, got: self.phi.len() });
        }
        for k in 0..self.k {
            let row = self.phi_row(k);
            if row.iter().any(|p| !(p.is_finite() && *p >= 0.0)) || libm::fabs(row.iter().sum::<f64>() - 1.0) > 1e-6 {
                return Err(Error::invalid("phi rows must be probability vectors"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocTopics {
    pub theta: Vec<f64>,
    pub dominant: usize,
    /// Final per-token topic ids; empty for inferred documents.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub assignments: Vec<u16>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inference {
    pub topics: DocTopics,
    /// No token of the document was in the model vocabulary; theta is uniform.
    pub out_of_vocabulary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicSummary {
    pub topic: usize,
    pub terms: Vec<(String, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theme: Option<String>,
}

/// Argmax with the lowest index winning ties.
pub fn dominant_topic(theta: &[f64]) -> usize {
    let mut best = 0;
    for (i, &t) in theta.iter().enumerate() {
        if t > theta[best] {
            best = i;
        }
    }
    best
}

/// Collapsed Gibbs state. Exposed so the count invariants can be checked
/// between sweeps.
#[derive(Debug, Clone)]
pub struct LdaSampler {
    k: usize,
    v: usize,
    alpha: f64,
    beta: f64,
    docs: Vec<Vec<u32>>,
    z: Vec<Vec<u16>>,
    n_dk: Vec<u32>,
    n_wk: Vec<u32>,
    n_k: Vec<u32>,
    rng: Rng,
    weights: Vec<f64>,
    sweeps: usize,
}

impl LdaSampler {
    /// Assigns every token a uniformly random topic.
    pub fn new(docs: &[Vec<u32>], n_terms: usize, k: usize, alpha: f64, beta: f64, seed: u64) -> Result<Self> {
        if k < 2 || k > u16::MAX as usize {
            return Err(Error::invalid("LDA needs 2 <= k <= 65535"));
        }
        let total: usize = docs.iter().map(Vec::len).sum();
        if total == 0 {
            return Err(Error::Empty("no in-vocabulary tokens".into()));
        }
        if k > total {
            return Err(Error::invalid("more topics than tokens"));
        }
        if let Some(&w) = docs.iter().flatten().find(|&&w| w as usize >= n_terms) {
            return Err(Error::DimensionMismatch { expected: n_terms, got: w as usize + 1 });
        }
        let mut rng = Rng::new(seed);
        let mut s = LdaSampler {
            k,
            v: n_terms,
            alpha,
            beta,
            docs: docs.to_vec(),
            z: Vec::with_capacity(docs.len()),
            n_dk: vec![0; docs.len() * k],
            n_wk: vec![0; n_terms * k],
            n_k: vec![0; k],
            rng: Rng::new(0),
            weights: vec![0.0; k],
            sweeps: 0,
        };
        for (d, doc) in docs.iter().enumerate() {
            let mut zd = Vec::with_capacity(doc.len());
            for &w in doc {
                let t = rng.below(k);
                zd.push(t as u16);
                s.n_dk[d * k + t] += 1;
                s.n_wk[w as usize * k + t] += 1;
                s.n_k[t] += 1;
            }
            s.z.push(zd);
        }
        s.rng = rng;
        Ok(s)
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// One pass over every token, resampling from the collapsed conditional.
    pub fn sweep(&mut self) {
        let k = self.k;
        let vbeta = self.v as f64 * self.beta;
        for d in 0..self.docs.len() {
            for i in 0..self.docs[d].len() {
                let w = self.docs[d][i] as usize;
                let old = self.z[d][i] as usize;
                self.n_dk[d * k + old] -= 1;
                self.n_wk[w * k + old] -= 1;
                self.n_k[old] -= 1;
                let mut total = 0.0;
                for t in 0..k {
                    total += (self.n_dk[d * k + t] as f64 + self.alpha) * (self.n_wk[w * k + t] as f64 + self.beta)
                        / (self.n_k[t] as f64 + vbeta);
                    self.weights[t] = total;
                }
                let u = self.rng.uniform() * total;
                let new = self.weights.iter().position(|&c| u < c).unwrap_or(k - 1);
                self.z[d][i] = new as u16;
                self.n_dk[d * k + new] += 1;
                self.n_wk[w * k + new] += 1;
                self.n_k[new] += 1;
            }
        }
        self.sweeps += 1;
    }

    /// Verifies the count tables against the assignments.
    pub fn check_counts(&self) -> Result<()> {
        let k = self.k;
        let mut n_dk = vec![0u32; self.n_dk.len()];
        let mut n_wk = vec![0u32; self.n_wk.len()];
        for (d, doc) in self.docs.iter().enumerate() {
            for (&w, &t) in doc.iter().zip(&self.z[d]) {
                n_dk[d * k + t as usize] += 1;
                n_wk[w as usize * k + t as usize] += 1;
            }
            let row: u32 = n_dk[d * k..(d + 1) * k].iter().sum();
            if row as usize != doc.len() {
                return Err(Error::Numeric("document-topic row does not match document length".into()));
            }
        }
        if n_dk != self.n_dk || n_wk != self.n_wk {
            return Err(Error::Numeric("count tables disagree with assignments".into()));
        }
        for t in 0..k {
            let col: u32 = (0..self.v).map(|w| self.n_wk[w * k + t]).sum();
            if col != self.n_k[t] {
                return Err(Error::Numeric("topic total disagrees with word-topic counts".into()));
            }
        }
        let total: usize = self.docs.iter().map(Vec::len).sum();
        if self.n_k.iter().map(|&c| c as usize).sum::<usize>() != total {
            return Err(Error::Numeric("token total changed".into()));
        }
        Ok(())
    }

    /// Joint log-likelihood `ln p(w, z)` of the current assignments.
    pub fn log_likelihood(&self) -> f64 {
        let (k, v) = (self.k as f64, self.v as f64);
        let lg = libm::lgamma;
        let mut ll = 0.0;
        for t in 0..self.k {
            for w in 0..self.v {
                let c = self.n_wk[w * self.k + t];
                if c > 0 {
                    ll += lg(c as f64 + self.beta) - lg(self.beta);
                }
            }
            ll += lg(v * self.beta) - lg(self.n_k[t] as f64 + v * self.beta);
        }
        let d = self.docs.len() as f64;
        ll += d * (lg(k * self.alpha) - k * lg(self.alpha));
        for (di, doc) in self.docs.iter().enumerate() {
            for t in 0..self.k {
                ll += lg(self.n_dk[di * self.k + t] as f64 + self.alpha);
            }
            ll -= lg(doc.len() as f64 + k * self.alpha);
        }
        ll
    }

    fn accumulate(&self, phi: &mut [f64], theta: &mut [f64]) {
        let k = self.k;
        let vbeta = self.v as f64 * self.beta;
        for t in 0..k {
            let den = self.n_k[t] as f64 + vbeta;
            for w in 0..self.v {
                phi[t * self.v + w] += (self.n_wk[w * k + t] as f64 + self.beta) / den;
            }
        }
        let kalpha = k as f64 * self.alpha;
        for (d, doc) in self.docs.iter().enumerate() {
            let den = doc.len() as f64 + kalpha;
            for t in 0..k {
                theta[d * k + t] += (self.n_dk[d * k + t] as f64 + self.alpha) / den;
            }
        }
    }
}

/// Fits LDA to `docs` (vocabulary ids in `0..vocab.len()`).
///
/// phi and theta are averages of the posterior-mean estimates taken every
/// `thin` sweeps after burn-in. With no such sweep the final state is used.
pub fn lda_fit(docs: &[Vec<u32>], vocab: &Vocabulary, params: &LdaParams) -> Result<(LdaModel, Vec<DocTopics>)> {
    params.validate()?;
    let alpha = params.alpha();
    let mut s = LdaSampler::new(docs, vocab.len(), params.k, alpha, params.beta, params.seed)?;
    fit_with(&mut s, vocab, params, |_| Ok(()))
}

/// Like [`lda_fit`] but calls `after_sweep` on the sampler after every sweep.
pub(crate) fn fit_with<F>(
    s: &mut LdaSampler,
    vocab: &Vocabulary,
    params: &LdaParams,
    mut after_sweep: F,
) -> Result<(LdaModel, Vec<DocTopics>)>
where
    F: FnMut(&LdaSampler) -> Result<()>,
{
    let (k, v) = (s.k, s.v);
    let mut phi = vec![0.0; k * v];
    let mut theta = vec![0.0; s.docs.len() * k];
    let mut samples = 0usize;
    let mut trace = alloc::vec![s.log_likelihood()];
    for it in 1..=params.iterations {
        s.sweep();
        after_sweep(s)?;
        if it % params.checkpoint_every == 0 {
            trace.push(s.log_likelihood());
        }
        if it > params.burn_in && (it - params.burn_in).is_multiple_of(params.thin) {
            s.accumulate(&mut phi, &mut theta);
            samples += 1;
        }
    }
    if samples == 0 {
        s.accumulate(&mut phi, &mut theta);
        samples = 1;
    }
    let inv = 1.0 / samples as f64;
    phi.iter_mut().for_each(|p| *p *= inv);
    theta.iter_mut().for_each(|p| *p *= inv);
    for row in phi.chunks_mut(v).chain(theta.chunks_mut(k)) {
        let sum: f64 = row.iter().sum();
        row.iter_mut().for_each(|p| *p /= sum);
    }
    if phi.iter().chain(&theta).any(|p| !p.is_finite()) {
        return Err(Error::Numeric("non-finite topic estimate".into()));
    }
    let doc_topics = theta
        .chunks(k)
        .zip(&s.z)
        .map(|(t, z)| DocTopics { theta: t.to_vec(), dominant: dominant_topic(t), assignments: z.clone() })
        .collect();
    let model = LdaModel {
        k,
        alpha: s.alpha,
        beta: s.beta,
        vocab_fingerprint: vocab.fingerprint(),
        n_terms: v,
        phi,
        seed: params.seed,
        iterations: params.iterations,
        log_likelihood_trace: trace,
        n_wk: s.n_wk.clone(),
        n_k: s.n_k.clone(),
    };
    Ok((model, doc_topics))
}

/// Fold-in inference for one document with phi held fixed. Tokens outside
/// the model vocabulary must already be dropped. The first half of the
/// sweeps is burn-in; theta averages the second half.
pub fn lda_infer(model: &LdaModel, doc: &[u32], iterations: usize, seed: u64) -> Result<Inference> {
    let k = model.k;
    if doc.is_empty() {
        let theta = vec![1.0 / k as f64; k];
        return Ok(Inference {
            topics: DocTopics { theta, dominant: 0, assignments: Vec::new() },
            out_of_vocabulary: true,
        });
    }
    if let Some(&w) = doc.iter().find(|&&w| w as usize >= model.n_terms) {
        return Err(Error::DimensionMismatch { expected: model.n_terms, got: w as usize + 1 });
    }
    let iterations = iterations.max(2);
    let mut rng = Rng::new(seed);
    let mut n_dk = vec![0u32; k];
    let mut z: Vec<usize> = doc
        .iter()
        .map(|_| {
            let t = rng.below(k);
            n_dk[t] += 1;
            t
        })
        .collect();
    let mut weights = vec![0.0; k];
    let mut theta = vec![0.0; k];
    let burn = iterations / 2;
    let den = doc.len() as f64 + k as f64 * model.alpha;
    for it in 0..iterations {
        for (i, &w) in doc.iter().enumerate() {
            n_dk[z[i]] -= 1;
            let mut total = 0.0;
            for t in 0..k {
                total += (n_dk[t] as f64 + model.alpha) * model.phi[t * model.n_terms + w as usize];
                weights[t] = total;
            }
            let u = rng.uniform() * total;
            let new = weights.iter().position(|&c| u < c).unwrap_or(k - 1);
            z[i] = new;
            n_dk[new] += 1;
        }
        if it >= burn {
            for t in 0..k {
                theta[t] += (n_dk[t] as f64 + model.alpha) / den;
            }
        }
    }
    let sum: f64 = theta.iter().sum();
    theta.iter_mut().for_each(|t| *t /= sum);
    Ok(Inference {
        topics: DocTopics { dominant: dominant_topic(&theta), theta, assignments: Vec::new() },
        out_of_vocabulary: false,
    })
}

/// Ids of the `n` most probable terms of topic `k`; ties go to the
/// lexicographically smaller term.
pub(crate) fn top_ids(model: &LdaModel, vocab: &Vocabulary, k: usize, n: usize) -> Result<Vec<usize>> {
    if k >= model.k {
        return Err(Error::invalid("topic index out of range"));
    }
    if vocab.len() != model.n_terms {
        return Err(Error::DimensionMismatch { expected: model.n_terms, got: vocab.len() });
    }
    let row = model.phi_row(k);
    let mut ids: Vec<usize> = (0..row.len()).collect();
    ids.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then_with(|| vocab.term(a).cmp(vocab.term(b))));
    ids.truncate(n);
    Ok(ids)
}

pub fn top_words(model: &LdaModel, vocab: &Vocabulary, k: usize, n: usize) -> Result<TopicSummary> {
    let row = model.phi_row(k.min(model.k.saturating_sub(1)));
    let terms = top_ids(model, vocab, k, n)?
        .into_iter()
        .map(|i| (String::from(vocab.term(i)), row[i]))
        .collect();
    Ok(TopicSummary { topic: k, terms, theme: None })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::corpus::CleanDocument;
    use crate::features::build_vocabulary;
    use crate::time::Timestamp;
    use alloc::format;
    use alloc::string::ToString;

    /// Two topics over disjoint five-word halves; each doc draws mostly from one.
    pub(crate) fn two_block_corpus(n_docs: usize, seed: u64) -> (Vocabulary, Vec<Vec<u32>>) {
        let mut rng = Rng::new(seed);
        let words: Vec<String> = (0..10).map(|i| format!("w{i}")).collect();
        let docs: Vec<CleanDocument> = (0..n_docs)
            .map(|d| {
                let block = d % 2;
                let toks: Vec<String> = (0..12)
                    .map(|_| {
                        let b = if rng.uniform() < 0.9 { block } else { 1 - block };
                        words[b * 5 + rng.below(5)].clone()
                    })
                    .collect();
                CleanDocument { id: d.to_string(), tokens: toks, timestamp: Timestamp(0), label: None }
            })
            .collect();
        let vocab = build_vocabulary(&docs, 1, 1.0).unwrap();
        let enc = docs.iter().map(|d| vocab.encode(&d.tokens)).collect();
        (vocab, enc)
    }

    fn quick(k: usize, seed: u64) -> LdaParams {
        LdaParams { iterations: 200, burn_in: 100, alpha: Some(0.5), ..LdaParams::new(k, seed) }
    }

    #[test]
    fn recovers_two_blocks() {
        let (vocab, docs) = two_block_corpus(200, 1);
        let (m, dt) = lda_fit(&docs, &vocab, &quick(2, 9)).unwrap();
        for k in 0..2 {
            let row = m.phi_row(k);
            let first: f64 = row[..5].iter().sum();
            assert!(first >= 0.95 || first <= 0.05, "topic {k} mass on first half {first}");
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        for d in &dt {
            assert!((d.theta.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert_eq!(d.dominant, dominant_topic(&d.theta));
        }
        let top = top_words(&m, &vocab, 0, 5).unwrap();
        let halves: Vec<bool> = top.terms.iter().map(|(t, _)| t.as_str() < "w5").collect();
        assert!(halves.iter().all(|&h| h == halves[0]));
    }

    #[test]
    fn counts_conserved_every_sweep() {
        let (vocab, docs) = two_block_corpus(40, 2);
        let p = quick(3, 1);
        let mut s = LdaSampler::new(&docs, vocab.len(), 3, 0.5, 0.01, 1).unwrap();
        s.check_counts().unwrap();
        let mut seen = 0;
        fit_with(&mut s, &vocab, &p, |s| {
            seen += 1;
            s.check_counts()
        })
        .unwrap();
        assert_eq!(seen, 200);
    }

    #[test]
    fn single_short_doc() {
        let docs = vec![CleanDocument::new("a", &["a", "a", "a"], Timestamp(0))];
        let vocab = build_vocabulary(&docs, 1, 1.0).unwrap();
        let enc = vec![vocab.encode(&docs[0].tokens)];
        let (_, dt) = lda_fit(&enc, &vocab, &quick(2, 3)).unwrap();
        assert!((dt[0].theta.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(dt[0].assignments.len(), 3);
    }

    #[test]
    fn huge_beta_flattens_phi() {
        let (vocab, docs) = two_block_corpus(20, 4);
        let p = LdaParams { beta: 1e6, ..quick(2, 1) };
        let (m, _) = lda_fit(&docs, &vocab, &p).unwrap();
        assert!(m.phi.iter().all(|&x| (x - 0.1).abs() < 1e-3));
    }

    #[test]
    fn deterministic() {
        let (vocab, docs) = two_block_corpus(30, 5);
        let a = lda_fit(&docs, &vocab, &quick(2, 8)).unwrap();
        let b = lda_fit(&docs, &vocab, &quick(2, 8)).unwrap();
        assert_eq!(a, b);
        let bits = |m: &LdaModel| m.phi.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a.0), bits(&b.0));
    }

    #[test]
    fn log_likelihood_improves() {
        let (vocab, docs) = two_block_corpus(100, 6);
        let (m, _) = lda_fit(&docs, &vocab, &LdaParams { alpha: Some(0.5), ..LdaParams::new(2, 3) }).unwrap();
        let tr = &m.log_likelihood_trace;
        assert_eq!(tr.len(), 101);
        let head: f64 = tr[..10].iter().sum::<f64>() / 10.0;
        let tail: f64 = tr[tr.len() - 10..].iter().sum::<f64>() / 10.0;
        assert!(tail >= head);
    }

    #[test]
    fn errors() {
        let (vocab, docs) = two_block_corpus(4, 7);
        assert!(lda_fit(&docs, &vocab, &quick(1, 0)).is_err());
        assert!(lda_fit(&[vec![], vec![]], &vocab, &quick(2, 0)).is_err());
        assert!(lda_fit(&[vec![0]], &vocab, &quick(2, 0)).is_err());
        let bad = LdaParams { burn_in: 200, ..quick(2, 0) };
        assert!(lda_fit(&docs, &vocab, &bad).is_err());
        let (m, _) = lda_fit(&docs, &vocab, &quick(2, 0)).unwrap();
        assert!(top_words(&m, &vocab, 2, 3).is_err());
    }

    #[test]
    fn inference() {
        let (vocab, docs) = two_block_corpus(200, 1);
        let (m, _) = lda_fit(&docs, &vocab, &quick(2, 9)).unwrap();
        let topic_of_w0 = if m.phi_row(0)[0] > m.phi_row(1)[0] { 0 } else { 1 };
        let doc = vec![0, 1, 2, 3, 4, 0, 1];
        let a = lda_infer(&m, &doc, 50, 4).unwrap();
        assert_eq!(a.topics.dominant, topic_of_w0);
        assert!(!a.out_of_vocabulary);
        assert_eq!(a, lda_infer(&m, &doc, 50, 4).unwrap());
        let empty = lda_infer(&m, &[], 50, 4).unwrap();
        assert!(empty.out_of_vocabulary);
        assert_eq!(empty.topics.theta, vec![0.5, 0.5]);
    }

    #[test]
    fn top_words_tie_break_and_order() {
        let docs = vec![CleanDocument::new("a", &["b", "a", "c"], Timestamp(0))];
        let vocab = build_vocabulary(&docs, 1, 1.0).unwrap();
        // terms are indexed a, b, c
        let m = LdaModel {
            k: 2,
            alpha: 1.0,
            beta: 0.1,
            vocab_fingerprint: vocab.fingerprint(),
            n_terms: 3,
            phi: vec![0.3, 0.5, 0.2, 0.4, 0.2, 0.4],
            seed: 0,
            iterations: 1,
            log_likelihood_trace: vec![],
            n_wk: vec![],
            n_k: vec![],
        };
        let t = top_words(&m, &vocab, 0, 2).unwrap();
        assert_eq!(t.terms, vec![("b".to_string(), 0.5), ("a".to_string(), 0.3)]);
        let t = top_words(&m, &vocab, 1, 3).unwrap();
        assert_eq!(t.terms.iter().map(|x| x.0.as_str()).collect::<Vec<_>>(), ["a", "c", "b"]);
    }
}
