//! Optimizers for the two linear models.
//!
//! Logistic regression runs full-batch gradient descent with step
//! `eta0 / (1 + epoch / decay_epochs)`. If a step would raise the objective it
//! is halved until it does not, which keeps the loss monotone.
//!
//! The linear SVM runs Pegasos: per epoch a seeded shuffle of the rows, then
//! one stochastic subgradient step per row with step `1 / (lambda * t)`,
//! followed by projection onto the ball of radius `1 / sqrt(lambda)`. The bias
//! is treated as the weight of a constant feature and is regularized with
//! the rest.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::model::{sigmoid, Fingerprints, LinearModel, ModelKind, Sample, TrainingMeta};
use crate::corpus::Label;
use crate::features::FeatureKind;
use crate::rng::Rng;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainParams {
    pub kind: ModelKind,
    pub feature_kind: FeatureKind,
    /// `l2` for logistic regression, `lambda` for the SVM.
    pub regularization: f64,
    pub epochs: usize,
    /// Logistic regression initial step.
    pub eta0: f64,
    /// Logistic regression decay horizon, in epochs.
    pub decay_epochs: f64,
    pub seed: u64,
}

impl TrainParams {
    pub fn logistic(feature_kind: FeatureKind, seed: u64) -> Self {
        TrainParams {
            kind: ModelKind::LogisticRegression,
            feature_kind,
            regularization: 1e-4,
            epochs: 100,
            eta0: 0.1,
            decay_epochs: 10.0,
            seed,
        }
    }

    pub fn svm(feature_kind: FeatureKind, seed: u64) -> Self {
        TrainParams {
            kind: ModelKind::LinearSvm,
            feature_kind,
            regularization: 1e-4,
            epochs: 50,
            eta0: 0.0,
            decay_epochs: 0.0,
            seed,
        }
    }
}

fn check_inputs<S: Sample>(x: &[S], y: &[Label]) -> Result<usize> {
    if x.is_empty() {
        return Err(Error::Empty("training set".into()));
    }
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    let d = x[0].dim();
    for row in x {
        if row.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: row.dim() });
        }
        if !row.all_finite() {
            return Err(Error::NonFinite("training features".into()));
        }
    }
    Ok(d)
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + libm::log1p(libm::exp(-z))
    } else {
        libm::log1p(libm::exp(z))
    }
}

/// Mean log-loss plus `(l2 / 2) * |w|^2`; the bias is not penalized.
pub fn logreg_objective<S: Sample>(x: &[S], y: &[Label], w: &[f64], b: f64, l2: f64) -> f64 {
    let n = x.len() as f64;
    let data: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| {
            let z = xi.dot(w) + b;
            // -[y log s(z) + (1-y) log(1 - s(z))]
            if *yi == Label::Relevant {
                softplus(-z)
            } else {
                softplus(z)
            }
        })
        .sum::<f64>()
        / n;
    data + 0.5 * l2 * w.iter().map(|v| v * v).sum::<f64>()
}

/// Objective and its analytic gradient `(grad_w, grad_b)`.
pub fn logreg_loss_and_grad<S: Sample>(x: &[S], y: &[Label], w: &[f64], b: f64, l2: f64) -> (f64, Vec<f64>, f64) {
    let n = x.len() as f64;
    let mut gw = vec![0.0; w.len()];
    let mut gb = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        let r = sigmoid(xi.dot(w) + b) - yi.index() as f64;
        xi.add_scaled_to(&mut gw, r / n);
        gb += r / n;
    }
    for (g, wi) in gw.iter_mut().zip(w) {
        *g += l2 * wi;
    }
    (logreg_objective(x, y, w, b, l2), gw, gb)
}

/// Mean hinge loss plus `(lambda / 2) * (|w|^2 + b^2)`.
pub fn svm_objective<S: Sample>(x: &[S], y: &[Label], w: &[f64], b: f64, lambda: f64) -> f64 {
    let n = x.len() as f64;
    let hinge: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (1.0 - sign(*yi) * (xi.dot(w) + b)).max(0.0))
        .sum::<f64>()
        / n;
    hinge + 0.5 * lambda * (w.iter().map(|v| v * v).sum::<f64>() + b * b)
}

fn sign(y: Label) -> f64 {
    if y == Label::Relevant {
        1.0
    } else {
        -1.0
    }
}

pub fn train_logreg<S: Sample>(x: &[S], y: &[Label], params: &TrainParams) -> Result<LinearModel> {
    train_logreg_traced(x, y, params).map(|(m, _)| m)
}

/// Like [`train_logreg`] but also returns the objective after every epoch
/// (index 0 is the starting point).
pub fn train_logreg_traced<S: Sample>(x: &[S], y: &[Label], params: &TrainParams) -> Result<(LinearModel, Vec<f64>)> {
    let d = check_inputs(x, y)?;
    let l2 = params.regularization;
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let (mut loss, mut gw, mut gb) = logreg_loss_and_grad(x, y, &w, b, l2);
    let mut trace = vec![loss];
    for epoch in 0..params.epochs {
        let mut eta = params.eta0 / (1.0 + epoch as f64 / params.decay_epochs.max(f64::MIN_POSITIVE));
        let mut accepted = false;
        for _ in 0..60 {
            let w_new: Vec<f64> = w.iter().zip(&gw).map(|(wi, g)| wi - eta * g).collect();
            let b_new = b - eta * gb;
            let l_new = logreg_objective(x, y, &w_new, b_new, l2);
            if l_new <= loss {
                w = w_new;
                b = b_new;
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if accepted {
            let next = logreg_loss_and_grad(x, y, &w, b, l2);
            loss = next.0;
            gw = next.1;
            gb = next.2;
        }
        if !loss.is_finite() {
            return Err(Error::Numeric("logistic regression diverged".into()));
        }
        trace.push(loss);
    }
    let model = LinearModel {
        kind: ModelKind::LogisticRegression,
        feature_kind: params.feature_kind,
        weights: w,
        bias: b,
        training_meta: TrainingMeta {
            seed: params.seed,
            epochs: params.epochs,
            regularization: l2,
            schedule: format!("gd-inverse-decay(eta0={},decay_epochs={})+halving", params.eta0, params.decay_epochs),
        },
        fingerprints: Fingerprints::default(),
    };
    Ok((model, trace))
}

pub fn train_linear_svm<S: Sample>(x: &[S], y: &[Label], params: &TrainParams) -> Result<LinearModel> {
    let d = check_inputs(x, y)?;
    let lambda = params.regularization;
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::invalid("SVM lambda must be positive"));
    }
    let radius = 1.0 / libm::sqrt(lambda);
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut rng = Rng::new(params.seed);
    let mut order: Vec<usize> = (0..x.len()).collect();
    let mut t: u64 = 0;
    for _ in 0..params.epochs {
        rng.shuffle(&mut order);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let yi = sign(y[i]);
            let margin = yi * (x[i].dot(&w) + b);
            let shrink = 1.0 - eta * lambda;
            for wj in w.iter_mut() {
                *wj *= shrink;
            }
            b *= shrink;
            if margin < 1.0 {
                x[i].add_scaled_to(&mut w, eta * yi);
                b += eta * yi;
            }
            let norm = libm::sqrt(w.iter().map(|v| v * v).sum::<f64>() + b * b);
            if norm > radius {
                let s = radius / norm;
                for wj in w.iter_mut() {
                    *wj *= s;
                }
                b *= s;
            }
        }
    }
    if w.iter().any(|v| !v.is_finite()) || !b.is_finite() {
        return Err(Error::Numeric("SVM weights became non-finite".into()));
    }
    Ok(LinearModel {
        kind: ModelKind::LinearSvm,
        feature_kind: params.feature_kind,
        weights: w,
        bias: b,
        training_meta: TrainingMeta {
            seed: params.seed,
            epochs: params.epochs,
            regularization: lambda,
            schedule: "pegasos(1/(lambda*t))+projection".into(),
        },
        fingerprints: Fingerprints::default(),
    })
}

pub fn train<S: Sample>(x: &[S], y: &[Label], params: &TrainParams) -> Result<LinearModel> {
    match params.kind {
        ModelKind::LogisticRegression => train_logreg(x, y, params),
        ModelKind::LinearSvm => train_linear_svm(x, y, params),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{evaluate, predict};

    fn separable_1d() -> (Vec<Vec<f64>>, Vec<Label>) {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for _ in 0..50 {
            x.push(vec![-1.0]);
            y.push(Label::Irrelevant);
            x.push(vec![1.0]);
            y.push(Label::Relevant);
        }
        (x, y)
    }

    #[test]
    fn logreg_separable_1d() {
        let (x, y) = separable_1d();
        let m = train_logreg(&x, &y, &TrainParams::logistic(FeatureKind::EmbeddingPca, 1)).unwrap();
        assert_eq!(evaluate(&m, &x, &y).unwrap().accuracy, 1.0);
    }

    #[test]
    fn heavy_l2_shrinks_weights() {
        let (x, y) = separable_1d();
        let p = TrainParams { regularization: 1e6, ..TrainParams::logistic(FeatureKind::EmbeddingPca, 1) };
        let m = train_logreg(&x, &y, &p).unwrap();
        let norm = libm::sqrt(m.weights.iter().map(|v| v * v).sum());
        assert!(norm < 1e-2, "{norm}");
    }

    #[test]
    fn logreg_loss_is_monotone() {
        let mut rng = Rng::new(5);
        let x: Vec<Vec<f64>> = (0..80).map(|_| (0..4).map(|_| rng.uniform() * 6.0 - 3.0).collect()).collect();
        let y: Vec<Label> = x.iter().map(|r| if r[0] + 0.5 * r[1] + rng.uniform() - 0.5 > 0.0 { Label::Relevant } else { Label::Irrelevant }).collect();
        let (_, trace) = train_logreg_traced(&x, &y, &TrainParams::logistic(FeatureKind::EmbeddingPca, 0)).unwrap();
        assert!(trace.windows(2).all(|w| w[1] <= w[0] + 1e-6));
        assert!(trace.last().unwrap() < &trace[0]);
    }

    #[test]
    fn svm_all_same_label() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 / 10.0, 1.0 - i as f64 / 20.0]).collect();
        for label in [Label::Relevant, Label::Irrelevant] {
            let y = vec![label; x.len()];
            let m = train_linear_svm(&x, &y, &TrainParams::svm(FeatureKind::EmbeddingPca, 2)).unwrap();
            assert!(x.iter().all(|r| predict(&m, r).unwrap().label == label));
        }
    }

    #[test]
    fn svm_deterministic() {
        let (x, y) = separable_1d();
        let p = TrainParams::svm(FeatureKind::EmbeddingPca, 9);
        assert_eq!(train_linear_svm(&x, &y, &p).unwrap(), train_linear_svm(&x, &y, &p).unwrap());
    }

    #[test]
    fn rejects_non_finite() {
        let x = vec![vec![f64::NAN]];
        let y = vec![Label::Relevant];
        assert!(matches!(train_logreg(&x, &y, &TrainParams::logistic(FeatureKind::Tfidf, 0)), Err(Error::NonFinite(_))));
        assert!(train_linear_svm(&x, &y, &TrainParams::svm(FeatureKind::Tfidf, 0)).is_err());
        let empty: Vec<Vec<f64>> = Vec::new();
        assert!(train_logreg(&empty, &[], &TrainParams::logistic(FeatureKind::Tfidf, 0)).is_err());
    }
}
