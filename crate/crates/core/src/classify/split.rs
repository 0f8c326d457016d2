use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::rng::Rng;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_frac: f64,
    pub test_frac: f64,
    pub val_frac: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl SplitSpec {
    pub fn new(seed: u64) -> Self {
        SplitSpec { train_frac: 0.75, test_frac: 0.15, val_frac: 0.10, seed, stratified: true }
    }
}

/// Index sets into the dataset, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub validation: Vec<usize>,
}

/// Rounds `x` to the nearest integer with halves going down, so leftovers
/// accrue to the training split.
fn round_half_down(x: f64) -> usize {
    let r = libm::ceil(x - 0.5 - 1e-9);
    if r < 0.0 {
        0
    } else {
        r as usize
    }
}

/// Largest-remainder apportionment of `total` across classes in proportion
/// to `quotas`. Ties go to the lower class index.
fn apportion(quotas: &[f64], total: usize) -> Vec<usize> {
    let mut out: Vec<usize> = quotas.iter().map(|q| libm::floor(*q + 1e-9) as usize).collect();
    let assigned: usize = out.iter().sum();
    let mut order: Vec<usize> = (0..quotas.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - libm::floor(quotas[a] + 1e-9);
        let fb = quotas[b] - libm::floor(quotas[b] + 1e-9);
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &c in order.iter().cycle().take(total.saturating_sub(assigned)) {
        out[c] += 1;
    }
    out
}

/// Train/test/validation split. Test and validation sizes are
/// `round(frac * n)` with halves rounded down; the remainder goes to train.
/// Stratified splits apportion each size across classes by largest remainder.
pub fn split(labels: &[Label], spec: &SplitSpec) -> Result<Split> {
    let sum = spec.train_frac + spec.test_frac + spec.val_frac;
    if (sum - 1.0).abs() > 1e-9 || spec.train_frac < 0.0 || spec.test_frac < 0.0 || spec.val_frac < 0.0 {
        return Err(Error::invalid("split fractions must be nonnegative and sum to 1"));
    }
    let n = labels.len();
    let n_test = round_half_down(spec.test_frac * n as f64);
    let n_val = round_half_down(spec.val_frac * n as f64);
    let mut rng = Rng::new(spec.seed);

    let groups: Vec<Vec<usize>> = if spec.stratified {
        let g: Vec<Vec<usize>> = [Label::Irrelevant, Label::Relevant]
            .iter()
            .map(|c| (0..n).filter(|&i| labels[i] == *c).collect())
            .collect();
        if g.iter().any(|v| v.is_empty()) {
            return Err(Error::invalid("stratified split needs at least one point per class"));
        }
        g
    } else {
        alloc::vec![(0..n).collect()]
    };
    let sizes: Vec<f64> = groups.iter().map(|g| g.len() as f64).collect();
    let test_counts = apportion(&sizes.iter().map(|s| s * spec.test_frac).collect::<Vec<_>>(), n_test);
    let val_counts = apportion(&sizes.iter().map(|s| s * spec.val_frac).collect::<Vec<_>>(), n_val);

    let mut out = Split { train: Vec::new(), test: Vec::new(), validation: Vec::new() };
    for (g, (nt, nv)) in groups.into_iter().zip(test_counts.into_iter().zip(val_counts)) {
        let mut g = g;
        rng.shuffle(&mut g);
        out.test.extend_from_slice(&g[..nt]);
        out.validation.extend_from_slice(&g[nt..nt + nv]);
        out.train.extend_from_slice(&g[nt + nv..]);
    }
    out.train.sort_unstable();
    out.test.sort_unstable();
    out.validation.sort_unstable();
    Ok(out)
}

/// Assigns each point to one of `k` folds. Each class is shuffled and dealt
/// round-robin, continuing the deal across classes so fold sizes differ by at
/// most one.
pub fn stratified_folds(labels: &[Label], k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::invalid("cross-validation needs k >= 2"));
    }
    if labels.len() < k {
        return Err(Error::invalid("fewer points than folds"));
    }
    let mut rng = Rng::new(seed);
    let mut fold = alloc::vec![0usize; labels.len()];
    let mut next = 0usize;
    for class in [Label::Irrelevant, Label::Relevant] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.is_empty() {
            continue;
        }
        if members.len() < k {
            return Err(Error::invalid("a class has fewer members than folds"));
        }
        rng.shuffle(&mut members);
        for i in members {
            fold[i] = next % k;
            next += 1;
        }
    }
    Ok(fold)
}
