use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::FormatError;
use crate::mfi::FrequentItem;

/// Fuzzy-membership vector of one message, aligned index-for-index with the
/// MFI it was computed against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector(pub Vec<f64>);

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Length of the longest common contiguous substring.
pub fn lcss_len(a: &[u8], b: &[u8]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    let mut best = 0;
    for &x in a {
        for (j, &y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { 0 };
            best = best.max(cur[j + 1]);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    best
}

/// LCSS of item and message divided by the item length.
pub fn membership(item: &[u8], message: &[u8]) -> f64 {
    assert!(!item.is_empty(), "frequent items are never empty");
    lcss_len(item, message) as f64 / item.len() as f64
}

pub fn feature_vectors<M: AsRef<[u8]> + Sync>(
    messages: &[M],
    mfi: &[FrequentItem],
) -> Result<Vec<FeatureVector>, FormatError> {
    if mfi.is_empty() {
        return Err(FormatError::EmptyMfi);
    }
    Ok(messages
        .par_iter()
        .map(|m| {
            FeatureVector(
                mfi.iter()
                    .map(|item| membership(&item.bytes, m.as_ref()))
                    .collect(),
            )
        })
        .collect())
}

pub fn euclid(a: &FeatureVector, b: &FeatureVector) -> Result<f64, FormatError> {
    if a.len() != b.len() {
        return Err(FormatError::LengthMismatch(a.len(), b.len()));
    }
    Ok(euclid_unchecked(&a.0, &b.0))
}

pub(crate) fn euclid_unchecked(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
