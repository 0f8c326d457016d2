//! Synthetic datasets: planted topic corpora, Gaussian blobs and dated
//! documents with known dominant topics.

use rand::{Rng, SeedableRng};
use rand_distr::{Dirichlet, Distribution, Normal};
use rand_xoshiro::Xoshiro256StarStar;
use topictrace_core::corpus::{CleanDocument, Label};
use topictrace_core::time::{Day, Timestamp};

pub fn rng(seed: u64) -> Xoshiro256StarStar {
    Xoshiro256StarStar::seed_from_u64(seed)
}

/// Draws an index from unnormalized weights.
pub fn categorical<R: Rng>(rng: &mut R, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}

#[derive(Debug, Clone)]
pub struct PlantedSpec {
    pub topics: usize,
    pub terms_per_topic: usize,
    pub docs: usize,
    pub doc_len: usize,
    pub alpha: f64,
    /// Weight of an off-block term relative to an in-block term.
    pub leak: f64,
}

impl Default for PlantedSpec {
    fn default() -> Self {
        PlantedSpec { topics: 4, terms_per_topic: 10, docs: 2000, doc_len: 20, alpha: 0.1, leak: 0.01 }
    }
}

#[derive(Debug, Clone)]
pub struct PlantedCorpus {
    /// Term names, `t00`, `t01`, ... in block order (already lexicographic).
    pub terms: Vec<String>,
    /// True topic-word distributions, row-major `topics x terms`.
    pub phi: Vec<Vec<f64>>,
    pub docs: Vec<CleanDocument>,
    /// Generating topic mixture per document.
    pub theta: Vec<Vec<f64>>,
}

/// LDA generative process over block-structured topics.
pub fn planted_corpus(spec: &PlantedSpec, seed: u64) -> PlantedCorpus {
    let v = spec.topics * spec.terms_per_topic;
    let width = if v > 100 { 3 } else { 2 };
    let terms: Vec<String> = (0..v).map(|i| format!("t{i:0width$}")).collect();
    let phi: Vec<Vec<f64>> = (0..spec.topics)
        .map(|k| {
            let raw: Vec<f64> =
                (0..v).map(|w| if w / spec.terms_per_topic == k { 1.0 } else { spec.leak }).collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / s).collect()
        })
        .collect();
    let mut r = rng(seed);
    let dirichlet = Dirichlet::new_with_size(spec.alpha, spec.topics).expect("valid Dirichlet");
    let mut docs = Vec::with_capacity(spec.docs);
    let mut thetas = Vec::with_capacity(spec.docs);
    for d in 0..spec.docs {
        let theta: Vec<f64> = dirichlet.sample(&mut r);
        let tokens: Vec<String> = (0..spec.doc_len)
            .map(|_| {
                let z = categorical(&mut r, &theta);
                terms[categorical(&mut r, &phi[z])].clone()
            })
            .collect();
        docs.push(CleanDocument { id: format!("p{d}"), tokens, timestamp: Timestamp(0), label: None });
        thetas.push(theta);
    }
    PlantedCorpus { terms, phi, docs, theta: thetas }
}

/// Two isotropic Gaussian blobs in 2-D at `(-c, 0)` (Irrelevant) and `(c, 0)`
/// (Relevant), with `c = separation * sigma / 2`. Rows are interleaved in a
/// random order.
pub fn gaussian_blobs(n_relevant: usize, n_irrelevant: usize, separation: f64, seed: u64) -> (Vec<Vec<f64>>, Vec<Label>) {
    let sigma = 1.0;
    let c = separation * sigma / 2.0;
    let normal = Normal::new(0.0, sigma).expect("valid normal");
    let mut r = rng(seed);
    let mut rows: Vec<(Vec<f64>, Label)> = Vec::with_capacity(n_relevant + n_irrelevant);
    for (n, center, label) in [(n_relevant, c, Label::Relevant), (n_irrelevant, -c, Label::Irrelevant)] {
        for _ in 0..n {
            rows.push((vec![center + normal.sample(&mut r), normal.sample(&mut r)], label));
        }
    }
    for i in (1..rows.len()).rev() {
        let j = r.gen_range(0..=i);
        rows.swap(i, j);
    }
    rows.into_iter().unzip()
}

/// Documents spread over `weeks` weeks from `origin`, each with a known
/// dominant topic in `0..k`.
pub fn dated_assignments(n: usize, weeks: usize, k: usize, origin: Day, seed: u64) -> Vec<(CleanDocument, usize)> {
    let mut r = rng(seed);
    (0..n)
        .map(|i| {
            let day = origin.plus(r.gen_range(0..(7 * weeks) as i64));
            let ts = Timestamp(day.start().0 + r.gen_range(0..86_400));
            let topic = r.gen_range(0..k);
            (CleanDocument { id: format!("d{i}"), tokens: vec!["x".into()], timestamp: ts, label: None }, topic)
        })
        .collect()
}
