use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::linalg::{fix_sign, symmetric_eigen, SymMatrix};
use crate::topics::{DocTopics, LdaModel};
use crate::{Error, Result};

fn check_distribution(p: &[f64]) -> Result<()> {
    if p.iter().any(|x| !x.is_finite() || *x < 0.0) || libm::fabs(p.iter().sum::<f64>() - 1.0) > 1e-6 {
        return Err(Error::invalid("input is not a probability vector"));
    }
    Ok(())
}

fn kl_to_mid(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, b)| a * libm::log(2.0 * a / (a + b)))
        .sum()
}

/// Jensen-Shannon divergence in nats. Both inputs must sum to 1 within 1e-6.
pub fn js_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), got: q.len() });
    }
    check_distribution(p)?;
    check_distribution(q)?;
    let js = 0.5 * kl_to_mid(p, q) + 0.5 * kl_to_mid(q, p);
    Ok(js.clamp(0.0, core::f64::consts::LN_2))
}

/// Classical multidimensional scaling into two dimensions. `dist` is a
/// symmetric distance matrix; coordinates come from the top two eigenpairs of
/// `-1/2 J D^2 J`, with negative eigenvalues treated as zero.
pub fn classical_mds(dist: &SymMatrix) -> Result<Vec<[f64; 2]>> {
    let n = dist.n;
    let mut b = SymMatrix::zeros(n);
    let sq = |i: usize, j: usize| dist.get(i, j) * dist.get(i, j);
    let row_mean: Vec<f64> = (0..n).map(|i| (0..n).map(|j| sq(i, j)).sum::<f64>() / n as f64).collect();
    let grand = row_mean.iter().sum::<f64>() / n as f64;
    for i in 0..n {
        for j in 0..n {
            b.set(i, j, -0.5 * (sq(i, j) - row_mean[i] - row_mean[j] + grand));
        }
    }
    let eig = symmetric_eigen(&b)?;
    let mut coords = alloc::vec![[0.0; 2]; n];
    for axis in 0..2.min(n) {
        let lambda = eig.values[axis];
        if lambda <= 1e-12 {
            continue;
        }
        let mut v = eig.vectors[axis].clone();
        fix_sign(&mut v);
        let s = libm::sqrt(lambda);
        for (c, x) in coords.iter_mut().zip(&v) {
            c[axis] = s * x;
        }
    }
    Ok(coords)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicMap {
    pub coords: Vec<[f64; 2]>,
    /// Mean document-topic weight; sums to 1.
    pub sizes: Vec<f64>,
    pub labels: Vec<String>,
}

/// Embeds topics by classical MDS on pairwise JS divergence between phi rows.
pub fn intertopic_map(model: &LdaModel, doc_topics: &[DocTopics], labels: &[String]) -> Result<TopicMap> {
    let k = model.k;
    if k < 2 {
        return Err(Error::invalid("topic map needs at least two topics"));
    }
    if labels.len() != k {
        return Err(Error::DimensionMismatch { expected: k, got: labels.len() });
    }
    if doc_topics.is_empty() {
        return Err(Error::Empty("no documents for topic sizes".into()));
    }
    let mut dist = SymMatrix::zeros(k);
    for i in 0..k {
        for j in 0..i {
            let d = js_divergence(model.phi_row(i), model.phi_row(j))?;
            dist.set(i, j, d);
            dist.set(j, i, d);
        }
    }
    let coords = classical_mds(&dist)?;
    let mut sizes = alloc::vec![0.0; k];
    for d in doc_topics {
        if d.theta.len() != k {
            return Err(Error::DimensionMismatch { expected: k, got: d.theta.len() });
        }
        for (s, t) in sizes.iter_mut().zip(&d.theta) {
            *s += t;
        }
    }
    let total: f64 = sizes.iter().sum();
    sizes.iter_mut().for_each(|s| *s /= total);
    Ok(TopicMap { coords, sizes, labels: labels.to_vec() })
}
