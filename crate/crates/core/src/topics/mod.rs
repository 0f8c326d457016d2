//! Latent Dirichlet allocation by collapsed Gibbs sampling, topic summaries,
//! coherence scores and the coherence-driven choice of topic count.
//!
//! Documents enter as vocabulary ids (see [`encode_corpus`]).

mod coherence;
mod lda;
mod sweep;

use alloc::vec::Vec;

pub use coherence::{npmi_coherence, umass_coherence, Coherence, CoherenceMeasure};
pub use lda::{
    dominant_topic, lda_fit, lda_infer, top_words, DocTopics, Inference, LdaModel, LdaParams, LdaSampler,
    TopicSummary,
};
pub use sweep::{coherence_sweep, score_k, select_k, SweepPoint, SweepResult};

use crate::corpus::CleanDocument;
use crate::features::Vocabulary;

/// Encodes each document against `vocab`, dropping out-of-vocabulary tokens.
pub fn encode_corpus(docs: &[CleanDocument], vocab: &Vocabulary) -> Vec<Vec<u32>> {
    docs.iter().map(|d| vocab.encode(&d.tokens)).collect()
}

/// Share of documents whose dominant topic is `k`, in percent, rounded to one
/// decimal. All zeros when `docs` is empty.
pub fn topic_distribution(docs: &[DocTopics], k: usize) -> Vec<f64> {
    let mut counts = alloc::vec![0usize; k];
    for d in docs {
        counts[d.dominant] += 1;
    }
    if docs.is_empty() {
        return alloc::vec![0.0; k];
    }
    counts
        .iter()
        .map(|&c| libm::round(1000.0 * c as f64 / docs.len() as f64) / 10.0)
        .collect()
}
