use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of `ℝᴺ` stored by its nonzero entries.
///
/// The support is strictly increasing and never carries an exact zero weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseIterate {
    dimension: usize,
    support: Vec<usize>,
    weights: Vec<f64>,
}

impl SparseIterate {
    pub fn zeros(dimension: usize) -> Self {
        Self {
            dimension,
            support: Vec::new(),
            weights: Vec::new(),
        }
    }

    /// Builds an iterate from a strictly increasing support. Zero weights are dropped.
    pub fn new(dimension: usize, support: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        if support.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                what: "iterate weights",
                expected: support.len(),
                found: weights.len(),
            });
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "support indices must be strictly increasing".into(),
            ));
        }
        if let Some(&last) = support.last() {
            if last >= dimension {
                return Err(Error::InvalidParameter(format!(
                    "support index {last} out of bounds for dimension {dimension}"
                )));
            }
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("iterate weights"));
        }
        Ok(Self::from_parts_dropping_zeros(dimension, &support, &weights))
    }

    /// Same as [`SparseIterate::new`] for callers that already uphold the ordering.
    pub(crate) fn from_parts_dropping_zeros(
        dimension: usize,
        support: &[usize],
        weights: &[f64],
    ) -> Self {
        let (support, weights) = support
            .iter()
            .zip(weights)
            .filter(|(_, w)| **w != 0.0)
            .map(|(i, w)| (*i, *w))
            .unzip();
        Self {
            dimension,
            support,
            weights,
        }
    }

    pub fn from_dense(x: &[f64]) -> Self {
        let (support, weights) = x
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != 0.0)
            .map(|(i, w)| (i, *w))
            .unzip();
        Self {
            dimension: x.len(),
            support,
            weights,
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension];
        self.scatter_into(&mut out);
        out
    }

    pub(crate) fn scatter_into(&self, out: &mut [f64]) {
        for (&i, &w) in self.support.iter().zip(&self.weights) {
            out[i] = w;
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn nnz(&self) -> usize {
        self.support.len()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn l1_norm(&self) -> f64 {
        self.weights.iter().map(|w| w.abs()).sum()
    }

    pub fn get(&self, index: usize) -> f64 {
        match self.support.binary_search(&index) {
            Ok(pos) => self.weights[pos],
            Err(_) => 0.0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.support.iter().copied().zip(self.weights.iter().copied())
    }

    /// Number of weights with magnitude above `threshold`.
    pub fn count_above(&self, threshold: f64) -> usize {
        self.weights.iter().filter(|w| w.abs() > threshold).count()
    }
}

/// Empirical dual certificate `η = Aᵀ(y − Ax)/λ` with its cached sup-norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    values: Vec<f64>,
    linf: f64,
}

impl Certificate {
    pub fn from_values(values: Vec<f64>) -> Self {
        let linf = super::linalg::norm_inf(&values);
        Self { values, linf }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn linf(&self) -> f64 {
        self.linf
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}
