use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::metrics::{evaluate, Metrics};
use super::model::Sample;
use super::split::stratified_folds;
use super::train::{train, TrainParams};
use crate::balance::{smote, Interpolate};
use crate::corpus::Label;
use crate::rng::derive_indexed_seed;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoteParams {
    pub enabled: bool,
    /// Desired minority / majority ratio after oversampling.
    pub ratio: f64,
    pub k: usize,
}

impl Default for SmoteParams {
    fn default() -> Self {
        SmoteParams { enabled: true, ratio: 1.0, k: 5 }
    }
}

/// Appends SMOTE samples of the minority class so that it reaches
/// `round(ratio * majority)`. Real points keep their positions. Returns the
/// number of synthetic points added.
pub fn oversample<P: Interpolate>(
    x: &mut Vec<P>,
    y: &mut Vec<Label>,
    params: &SmoteParams,
    seed: u64,
) -> Result<usize> {
    if !params.enabled {
        return Ok(0);
    }
    let rel = y.iter().filter(|l| **l == Label::Relevant).count();
    let irr = y.len() - rel;
    let (minority_label, n_min, n_maj) =
        if irr <= rel { (Label::Irrelevant, irr, rel) } else { (Label::Relevant, rel, irr) };
    let target = (libm::round(params.ratio * n_maj as f64) as usize).max(n_min);
    if target == n_min || n_min < 2 {
        return Ok(0);
    }
    let minority: Vec<P> = x.iter().zip(y.iter()).filter(|(_, l)| **l == minority_label).map(|(p, _)| p.clone()).collect();
    let out = smote(&minority, target, params.k, seed)?;
    let added = out.synthetic.len();
    x.extend(out.synthetic);
    y.extend(core::iter::repeat_n(minority_label, added));
    Ok(added)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricSummary {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl MetricSummary {
    fn of(m: &Metrics) -> Self {
        MetricSummary { accuracy: m.accuracy, precision: m.precision, recall: m.recall, f1: m.f1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub folds: Vec<Metrics>,
    pub synthetic_per_fold: Vec<usize>,
    /// Unweighted mean over folds.
    pub mean: MetricSummary,
    /// Sample standard deviation over folds (divisor `k - 1`).
    pub std: MetricSummary,
}

impl CvReport {
    pub fn from_folds(folds: Vec<Metrics>, synthetic_per_fold: Vec<usize>) -> Self {
        let k = folds.len() as f64;
        let rows: Vec<MetricSummary> = folds.iter().map(MetricSummary::of).collect();
        let field = |f: fn(&MetricSummary) -> f64| {
            let mean = rows.iter().map(f).sum::<f64>() / k;
            let var = if rows.len() > 1 {
                rows.iter().map(|r| (f(r) - mean) * (f(r) - mean)).sum::<f64>() / (k - 1.0)
            } else {
                0.0
            };
            (mean, libm::sqrt(var))
        };
        let (a, sa) = field(|r| r.accuracy);
        let (p, sp) = field(|r| r.precision);
        let (r, sr) = field(|r| r.recall);
        let (f, sf) = field(|r| r.f1);
        CvReport {
            folds,
            synthetic_per_fold,
            mean: MetricSummary { accuracy: a, precision: p, recall: r, f1: f },
            std: MetricSummary { accuracy: sa, precision: sp, recall: sr, f1: sf },
        }
    }
}

/// Runs one fold: oversample the training portion, train, evaluate the
/// held-out portion. Exposed so callers can run folds concurrently.
pub fn run_fold<P: Interpolate + Sample>(
    x: &[P],
    y: &[Label],
    folds: &[usize],
    fold: usize,
    params: &TrainParams,
    smote_params: &SmoteParams,
    seed: u64,
) -> Result<(Metrics, usize)> {
    let mut tx = Vec::new();
    let mut ty = Vec::new();
    let mut hx = Vec::new();
    let mut hy = Vec::new();
    for i in 0..x.len() {
        if folds[i] == fold {
            hx.push(x[i].clone());
            hy.push(y[i]);
        } else {
            tx.push(x[i].clone());
            ty.push(y[i]);
        }
    }
    let added = oversample(&mut tx, &mut ty, smote_params, derive_indexed_seed(seed, "cv-smote", fold as u64))?;
    let p = TrainParams { seed: derive_indexed_seed(seed, "cv-train", fold as u64), ..params.clone() };
    let model = train(&tx, &ty, &p)?;
    Ok((evaluate(&model, &hx, &hy)?, added))
}

/// Stratified k-fold cross-validation with SMOTE applied inside each fold's
/// training portion only.
pub fn cross_validate<P: Interpolate + Sample>(
    x: &[P],
    y: &[Label],
    params: &TrainParams,
    smote_params: &SmoteParams,
    k: usize,
    seed: u64,
) -> Result<CvReport> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    let folds = stratified_folds(y, k, derive_indexed_seed(seed, "cv-folds", 0))?;
    let mut metrics = Vec::with_capacity(k);
    let mut added = Vec::with_capacity(k);
    for f in 0..k {
        let (m, a) = run_fold(x, y, &folds, f, params, smote_params, seed)?;
        metrics.push(m);
        added.push(a);
    }
    Ok(CvReport::from_folds(metrics, added))
}

/// Fold assignment used by [`cross_validate`] for a given seed.
pub fn cv_folds(y: &[Label], k: usize, seed: u64) -> Result<Vec<usize>> {
    stratified_folds(y, k, derive_indexed_seed(seed, "cv-folds", 0))
}
