use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::features::{FeatureKind, SparseVector};
use crate::{Error, Result};

/// A feature row a linear model can consume.
pub trait Sample {
    fn dim(&self) -> usize;
    fn dot(&self, w: &[f64]) -> f64;
    /// `w += a * self`.
    fn add_scaled_to(&self, w: &mut [f64], a: f64);
    fn all_finite(&self) -> bool;
}

impl Sample for Vec<f64> {
    fn dim(&self) -> usize {
        self.len()
    }

    fn dot(&self, w: &[f64]) -> f64 {
        self.iter().zip(w).map(|(a, b)| a * b).sum()
    }

    fn add_scaled_to(&self, w: &mut [f64], a: f64) {
        for (wi, xi) in w.iter_mut().zip(self) {
            *wi += a * xi;
        }
    }

    fn all_finite(&self) -> bool {
        self.iter().all(|x| x.is_finite())
    }
}

impl Sample for SparseVector {
    fn dim(&self) -> usize {
        SparseVector::dim(self)
    }

    fn dot(&self, w: &[f64]) -> f64 {
        self.entries().iter().map(|&(i, x)| w[i as usize] * x).sum()
    }

    fn add_scaled_to(&self, w: &mut [f64], a: f64) {
        for &(i, x) in self.entries() {
            w[i as usize] += a * x;
        }
    }

    fn all_finite(&self) -> bool {
        self.entries().iter().all(|e| e.1.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    LogisticRegression,
    LinearSvm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub seed: u64,
    pub epochs: usize,
    pub regularization: f64,
    pub schedule: String,
}

/// Fingerprints of the feature space a model was trained in.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprints {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vocabulary: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pca: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub kind: ModelKind,
    pub feature_kind: FeatureKind,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub training_meta: TrainingMeta,
    #[serde(default)]
    pub fingerprints: Fingerprints,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: Label,
    pub score: f64,
    /// `sigmoid(score)` for logistic regression.
    pub probability: Option<f64>,
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

impl LinearModel {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn score<S: Sample>(&self, x: &S) -> Result<f64> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.dim() });
        }
        Ok(x.dot(&self.weights) + self.bias)
    }

    /// Refuses to run on a feature space other than the one it was trained in.
    /// A `None` on either side is not compared.
    pub fn check_fingerprints(&self, actual: &Fingerprints) -> Result<()> {
        let pairs = [
            (&self.fingerprints.vocabulary, &actual.vocabulary),
            (&self.fingerprints.pca, &actual.pca),
        ];
        for (want, got) in pairs {
            if let (Some(w), Some(g)) = (want, got) {
                if w != g {
                    return Err(Error::FingerprintMismatch { expected: w.clone(), got: g.clone() });
                }
            }
        }
        Ok(())
    }
}

/// `score = w . x + b`; Relevant iff `score >= 0`.
pub fn predict<S: Sample>(model: &LinearModel, x: &S) -> Result<Prediction> {
    let score = model.score(x)?;
    let label = if score >= 0.0 { Label::Relevant } else { Label::Irrelevant };
    let probability = match model.kind {
        ModelKind::LogisticRegression => Some(sigmoid(score)),
        ModelKind::LinearSvm => None,
    };
    Ok(Prediction { label, score, probability })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelSummary {
    pub n_relevant: usize,
    pub n_irrelevant: usize,
    /// Rounded to three decimals.
    pub relevant_fraction: f64,
}

/// Predicts every row and summarizes the label split.
pub fn bulk_label<S: Sample>(model: &LinearModel, rows: &[S]) -> Result<(Vec<Prediction>, LabelSummary)> {
    if rows.is_empty() {
        return Err(Error::Empty("nothing to label".into()));
    }
    let preds = rows.iter().map(|x| predict(model, x)).collect::<Result<Vec<_>>>()?;
    let n_relevant = preds.iter().filter(|p| p.label == Label::Relevant).count();
    let frac = n_relevant as f64 / preds.len() as f64;
    let summary = LabelSummary {
        n_relevant,
        n_irrelevant: preds.len() - n_relevant,
        relevant_fraction: libm::round(frac * 1000.0) / 1000.0,
    };
    Ok((preds, summary))
}
