//! SMOTE oversampling of a minority class.
//!
//! For synthetic index `s`, the base point is `minority[s % n]` (round-robin),
//! the neighbour is drawn uniformly from its `k` nearest minority neighbours
//! (one `below(k)` draw), then the gap `u` is one `uniform()` draw. That draw
//! order is part of the reproducibility contract.

use alloc::vec::Vec;

use crate::features::SparseVector;
use crate::rng::Rng;
use crate::{Error, Result};

/// A point SMOTE can measure and interpolate.
pub trait Interpolate: Clone {
    fn squared_distance(&self, other: &Self) -> f64;
    /// `self + u * (other - self)`.
    fn interpolate(&self, other: &Self, u: f64) -> Self;
}

impl Interpolate for Vec<f64> {
    fn squared_distance(&self, other: &Self) -> f64 {
        self.iter().zip(other).map(|(a, b)| (a - b) * (a - b)).sum()
    }

    fn interpolate(&self, other: &Self, u: f64) -> Self {
        self.iter().zip(other).map(|(a, b)| a + u * (b - a)).collect()
    }
}

impl Interpolate for SparseVector {
    fn squared_distance(&self, other: &Self) -> f64 {
        SparseVector::squared_distance(self, other)
    }

    /// Interpolates on the union of the pair's nonzero indices only.
    fn interpolate(&self, other: &Self, u: f64) -> Self {
        let pairs = self.merge_with(other).map(|(i, a, b)| (i, a + u * (b - a))).collect();
        SparseVector::from_pairs(self.dim(), pairs).unwrap_or_else(|_| SparseVector::empty(self.dim()))
    }
}

/// Indices of the `k` nearest points to `points[query]` (Euclidean), excluding
/// the query itself. Ties go to the lower index.
pub fn knn_indices<P: Interpolate>(points: &[P], query: usize, k: usize) -> Result<Vec<usize>> {
    if query >= points.len() {
        return Err(Error::invalid("query index out of range"));
    }
    if k == 0 || k >= points.len() {
        return Err(Error::invalid("k must satisfy 1 <= k < number of points"));
    }
    let q = &points[query];
    let mut dist: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != query)
        .map(|(i, p)| (q.squared_distance(p), i))
        .collect();
    dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(dist.into_iter().take(k).map(|(_, i)| i).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoteOutput<P> {
    pub synthetic: Vec<P>,
    /// Neighbour count actually used.
    pub k: usize,
    /// Set when the requested `k` exceeded `n - 1` and was lowered.
    pub k_clamped: bool,
}

/// Generates `target_count - minority.len()` synthetic minority points.
pub fn smote<P: Interpolate>(minority: &[P], target_count: usize, k: usize, seed: u64) -> Result<SmoteOutput<P>> {
    let n = minority.len();
    if n < 2 {
        return Err(Error::invalid("SMOTE needs at least two minority points"));
    }
    if target_count < n {
        return Err(Error::invalid("target count is below the minority size"));
    }
    if k == 0 {
        return Err(Error::invalid("SMOTE k must be positive"));
    }
    let k_used = k.min(n - 1);
    let needed = target_count - n;
    let mut neighbours: Vec<Option<Vec<usize>>> = alloc::vec![None; n];
    let mut rng = Rng::new(seed);
    let mut synthetic = Vec::with_capacity(needed);
    for s in 0..needed {
        let i = s % n;
        if neighbours[i].is_none() {
            neighbours[i] = Some(knn_indices(minority, i, k_used)?);
        }
        let nn = neighbours[i].as_ref().map(|v| v[rng.below(k_used)]).unwrap_or(i);
        let u = rng.uniform();
        synthetic.push(minority[i].interpolate(&minority[nn], u));
    }
    Ok(SmoteOutput { synthetic, k: k_used, k_clamped: k_used < k })
}
