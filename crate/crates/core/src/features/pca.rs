use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::fingerprint::Fingerprinter;
use crate::linalg::{dot, fix_sign, norm, symmetric_eigen, SymMatrix};
use crate::{Error, Result};

/// Principal axes of a set of dense vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `k` orthonormal directions, each of length `d`.
    pub components: Vec<Vec<f64>>,
    /// Sample variance (divisor `n - 1`) along each component, nonincreasing.
    pub explained_variance: Vec<f64>,
}

/// Fits the top-`k` principal components.
///
/// Uses the `d x d` scatter matrix when `n > d` and the `n x n` Gram matrix
/// otherwise. Components with zero variance are completed to an orthonormal
/// set by Gram-Schmidt over the standard basis. Each component is signed so
/// that its largest-magnitude entry is positive.
pub fn pca_fit(vectors: &[Vec<f64>], k: usize) -> Result<PcaModel> {
    let n = vectors.len();
    if n < 2 {
        return Err(Error::invalid("PCA needs at least two vectors"));
    }
    let d = vectors[0].len();
    if let Some(v) = vectors.iter().find(|v| v.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: v.len() });
    }
    if k == 0 || k > d || k > n - 1 {
        return Err(Error::invalid("PCA component count must satisfy 1 <= k <= min(d, n - 1)"));
    }
    if vectors.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("PCA input".into()));
    }

    let mut mean = vec![0.0; d];
    for v in vectors {
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let centered: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| v.iter().zip(&mean).map(|(x, m)| x - m).collect())
        .collect();
    let total: f64 = centered.iter().map(|c| dot(c, c)).sum();
    if total <= 0.0 {
        return Err(Error::Numeric("all input vectors are identical; no variance to explain".into()));
    }

    let (values, mut dirs) = if n > d {
        let mut s = SymMatrix::zeros(d);
        for c in &centered {
            for i in 0..d {
                let ci = c[i];
                if ci == 0.0 {
                    continue;
                }
                let row = &mut s.data[i * d..i * d + i + 1];
                for (j, r) in row.iter_mut().enumerate() {
                    *r += ci * c[j];
                }
            }
        }
        let e = symmetric_eigen(&s)?;
        (e.values, e.vectors)
    } else {
        let mut g = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                g.set(i, j, dot(&centered[i], &centered[j]));
            }
        }
        let e = symmetric_eigen(&g)?;
        let dirs = e
            .values
            .iter()
            .zip(&e.vectors)
            .map(|(&lambda, u)| {
                let mut v = vec![0.0; d];
                if lambda > 0.0 {
                    for (c, &w) in centered.iter().zip(u) {
                        for (vi, ci) in v.iter_mut().zip(c) {
                            *vi += w * ci;
                        }
                    }
                }
                v
            })
            .collect();
        (e.values, dirs)
    };

    let tol = values[0].abs().max(total) * 1e-12;
    let mut components: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut explained_variance = Vec::with_capacity(k);
    for (idx, lambda) in values.iter().copied().enumerate().take(k) {
        let candidate = core::mem::take(&mut dirs[idx]);
        let dir = if lambda > tol {
            orthonormalize(candidate, &components)
        } else {
            None
        };
        let dir = match dir {
            Some(v) => v,
            None => complete_basis(&components, d)
                .ok_or_else(|| Error::Numeric("could not complete an orthonormal basis".into()))?,
        };
        components.push(dir);
        explained_variance.push(if lambda > tol { lambda / (n - 1) as f64 } else { 0.0 });
    }
    for c in &mut components {
        fix_sign(c);
    }
    Ok(PcaModel { mean, components, explained_variance })
}

fn orthonormalize(mut v: Vec<f64>, basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    let start = norm(&v);
    for b in basis {
        let p = dot(&v, b);
        for (x, y) in v.iter_mut().zip(b) {
            *x -= p * y;
        }
    }
    let nv = norm(&v);
    if nv <= start * 1e-8 || nv == 0.0 {
        return None;
    }
    for x in &mut v {
        *x /= nv;
    }
    Some(v)
}

fn complete_basis(basis: &[Vec<f64>], d: usize) -> Option<Vec<f64>> {
    (0..d).find_map(|axis| {
        let mut e = vec![0.0; d];
        e[axis] = 1.0;
        orthonormalize(e, basis)
    })
}

impl PcaModel {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    /// Projection `(v - mean) . components[j]` for each component.
    pub fn transform(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: v.len() });
        }
        let centered: Vec<f64> = v.iter().zip(&self.mean).map(|(x, m)| x - m).collect();
        Ok(self.components.iter().map(|c| dot(&centered, c)).collect())
    }

    /// `mean + sum_j z[j] * components[j]`.
    pub fn inverse_transform(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.k() {
            return Err(Error::DimensionMismatch { expected: self.k(), got: z.len() });
        }
        let mut out = self.mean.clone();
        for (zj, c) in z.iter().zip(&self.components) {
            for (o, ci) in out.iter_mut().zip(c) {
                *o += zj * ci;
            }
        }
        Ok(out)
    }

    pub fn fingerprint(&self) -> String {
        let mut f = Fingerprinter::default();
        f.u64(self.dim() as u64).u64(self.k() as u64);
        for x in self.mean.iter().chain(self.components.iter().flatten()) {
            f.f64(*x);
        }
        f.finish()
    }
}

/// Free-function form of [`PcaModel::transform`].
pub fn pca_transform(model: &PcaModel, v: &[f64]) -> Result<Vec<f64>> {
    model.transform(v)
}
