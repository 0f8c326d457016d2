use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::coherence::{npmi_coherence, umass_coherence, CoherenceMeasure};
use super::lda::{lda_fit, LdaParams};
use crate::features::Vocabulary;
use crate::rng::derive_indexed_seed;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub k: usize,
    pub mean_coherence: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    pub selected: Option<usize>,
}

/// Fits one model with `k` topics and scores it. The fit seed is derived
/// from `master_seed` and `k`, so points can be computed in any order.
pub fn score_k(
    docs: &[Vec<u32>],
    vocab: &Vocabulary,
    k: usize,
    base: &LdaParams,
    measure: CoherenceMeasure,
    top_n: usize,
    master_seed: u64,
) -> SweepPoint {
    let params = LdaParams { k, seed: derive_indexed_seed(master_seed, "lda-sweep", k as u64), ..base.clone() };
    let scored = lda_fit(docs, vocab, &params).and_then(|(model, _)| match measure {
        CoherenceMeasure::Umass => umass_coherence(&model, vocab, docs, top_n),
        CoherenceMeasure::Npmi => npmi_coherence(&model, vocab, docs, top_n, 10),
    });
    match scored {
        Ok(c) if c.mean.is_finite() => SweepPoint { k, mean_coherence: Some(c.mean), error: None },
        Ok(_) => SweepPoint { k, mean_coherence: None, error: Some("non-finite coherence".into()) },
        Err(e) => SweepPoint { k, mean_coherence: None, error: Some(e.to_string()) },
    }
}

/// Highest mean coherence; the smallest k wins ties. Failed points are skipped.
pub fn select_k(points: &[SweepPoint]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for p in points {
        if let Some(c) = p.mean_coherence {
            match best {
                Some((bk, bc)) if c < bc || (c == bc && p.k > bk) => {}
                _ => best = Some((p.k, c)),
            }
        }
    }
    best.map(|b| b.0)
}

/// Fits every k in `k_range` in turn. A failed fit is recorded on its point
/// and the sweep continues.
pub fn coherence_sweep(
    docs: &[Vec<u32>],
    vocab: &Vocabulary,
    k_range: &[usize],
    base: &LdaParams,
    measure: CoherenceMeasure,
    top_n: usize,
    master_seed: u64,
) -> Result<SweepResult> {
    if k_range.is_empty() {
        return Err(crate::Error::invalid("empty k range"));
    }
    if k_range.iter().any(|&k| k < 2) {
        return Err(crate::Error::invalid("every k in the sweep must be >= 2"));
    }
    let points: Vec<SweepPoint> =
        k_range.iter().map(|&k| score_k(docs, vocab, k, base, measure, top_n, master_seed)).collect();
    Ok(SweepResult { selected: select_k(&points), points })
}
