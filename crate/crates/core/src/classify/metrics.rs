use serde::{Deserialize, Serialize};

use super::model::{predict, LinearModel, Sample};
use crate::corpus::Label;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

/// Binary evaluation results. Class index 0 is Irrelevant, 1 is Relevant.
///
/// `precision`, `recall` and `f1` are support-weighted averages of the
/// per-class values; the weighted `f1` is the weighted mean of per-class F1,
/// not the harmonic mean of the weighted precision and recall.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// `confusion[true][predicted]`.
    pub confusion: [[u64; 2]; 2],
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub per_class: [ClassMetrics; 2],
    /// Set when some ratio had a zero denominator and was reported as 0.
    pub zero_division: bool,
}

fn ratio(num: u64, den: u64, flag: &mut bool) -> f64 {
    if den == 0 {
        *flag = true;
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl Metrics {
    pub fn from_confusion(confusion: [[u64; 2]; 2]) -> Result<Metrics> {
        let total: u64 = confusion.iter().flatten().sum();
        if total == 0 {
            return Err(Error::Empty("evaluation set".into()));
        }
        let mut zero_division = false;
        let mut per_class = [ClassMetrics::default(); 2];
        for c in 0..2 {
            let tp = confusion[c][c];
            let predicted = confusion[0][c] + confusion[1][c];
            let actual = confusion[c][0] + confusion[c][1];
            let p = ratio(tp, predicted, &mut zero_division);
            let r = ratio(tp, actual, &mut zero_division);
            let f1 = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
            per_class[c] = ClassMetrics { precision: p, recall: r, f1, support: actual };
        }
        let weighted = |f: fn(&ClassMetrics) -> f64| {
            per_class.iter().map(|m| f(m) * m.support as f64).sum::<f64>() / total as f64
        };
        Ok(Metrics {
            confusion,
            accuracy: (confusion[0][0] + confusion[1][1]) as f64 / total as f64,
            precision: weighted(|m| m.precision),
            recall: weighted(|m| m.recall),
            f1: weighted(|m| m.f1),
            per_class,
            zero_division,
        })
    }

    pub fn from_predictions(truth: &[Label], predicted: &[Label]) -> Result<Metrics> {
        if truth.len() != predicted.len() {
            return Err(Error::DimensionMismatch { expected: truth.len(), got: predicted.len() });
        }
        let mut confusion = [[0u64; 2]; 2];
        for (t, p) in truth.iter().zip(predicted) {
            confusion[t.index()][p.index()] += 1;
        }
        Metrics::from_confusion(confusion)
    }

    pub fn total(&self) -> u64 {
        self.confusion.iter().flatten().sum()
    }
}

/// Predicts every row and tallies against `y`.
pub fn evaluate<S: Sample>(model: &LinearModel, x: &[S], y: &[Label]) -> Result<Metrics> {
    let predicted = x
        .iter()
        .map(|row| predict(model, row).map(|p| p.label))
        .collect::<Result<alloc::vec::Vec<_>>>()?;
    Metrics::from_predictions(y, &predicted)
}
