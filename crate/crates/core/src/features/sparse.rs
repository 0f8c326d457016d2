use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Sparse vector of `(index, weight)` pairs with strictly increasing indices
/// and no stored zeros.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SparseVector {
    dim: usize,
    entries: Vec<(u32, f64)>,
}

impl SparseVector {
    pub fn empty(dim: usize) -> Self {
        SparseVector { dim, entries: Vec::new() }
    }

    /// Sorts by index, sums repeated indices and drops zeros.
    pub fn from_pairs(dim: usize, mut pairs: Vec<(u32, f64)>) -> Result<Self> {
        pairs.sort_by_key(|p| p.0);
        let mut entries: Vec<(u32, f64)> = Vec::with_capacity(pairs.len());
        for (i, w) in pairs {
            if i as usize >= dim {
                return Err(Error::DimensionMismatch { expected: dim, got: i as usize + 1 });
            }
            if !w.is_finite() {
                return Err(Error::NonFinite("sparse weight".into()));
            }
            match entries.last_mut() {
                Some(last) if last.0 == i => last.1 += w,
                _ => entries.push((i, w)),
            }
        }
        entries.retain(|e| e.1 != 0.0);
        Ok(SparseVector { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.entries.iter().map(|e| e.1 * e.1).sum())
    }

    pub fn get(&self, index: u32) -> f64 {
        self.entries
            .binary_search_by_key(&index, |e| e.0)
            .map(|p| self.entries[p].1)
            .unwrap_or(0.0)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = alloc::vec![0.0; self.dim];
        for &(i, w) in &self.entries {
            v[i as usize] = w;
        }
        v
    }

    /// Visits the union of nonzero indices of `self` and `other` in order,
    /// yielding `(index, self_value, other_value)`.
    pub fn merge_with<'a>(&'a self, other: &'a SparseVector) -> impl Iterator<Item = (u32, f64, f64)> + 'a {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j) = (0, 0);
        core::iter::from_fn(move || match (a.get(i), b.get(j)) {
            (Some(&(ia, wa)), Some(&(ib, wb))) => {
                if ia == ib {
                    i += 1;
                    j += 1;
                    Some((ia, wa, wb))
                } else if ia < ib {
                    i += 1;
                    Some((ia, wa, 0.0))
                } else {
                    j += 1;
                    Some((ib, 0.0, wb))
                }
            }
            (Some(&(ia, wa)), None) => {
                i += 1;
                Some((ia, wa, 0.0))
            }
            (None, Some(&(ib, wb))) => {
                j += 1;
                Some((ib, 0.0, wb))
            }
            (None, None) => None,
        })
    }

    pub fn squared_distance(&self, other: &SparseVector) -> f64 {
        self.merge_with(other).map(|(_, a, b)| (a - b) * (a - b)).sum()
    }
}
