//! Relevance classification: linear models, training, evaluation, splits and
//! cross-validation.

mod cv;
mod metrics;
mod model;
mod split;
mod train;

pub use cv::{cross_validate, cv_folds, oversample, run_fold, CvReport, MetricSummary, SmoteParams};
pub use metrics::{evaluate, ClassMetrics, Metrics};
pub use model::{bulk_label, predict, Fingerprints, LabelSummary, LinearModel, ModelKind, Prediction, Sample, TrainingMeta};
pub use split::{split, stratified_folds, Split, SplitSpec};
pub use train::{
    logreg_loss_and_grad, logreg_objective, svm_objective, train, train_linear_svm, train_logreg, train_logreg_traced,
    TrainParams,
};

use crate::corpus::Label;

/// Which split a point came from and whether SMOTE made it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Real,
    Synthetic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoint<P> {
    pub features: P,
    pub label: Label,
    pub origin: Origin,
}
