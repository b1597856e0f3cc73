//! Clustering and state machine agreement scores.

mod matching;
mod truth;

use std::collections::BTreeMap;

pub use matching::{match_states, smc, tmc};
pub use truth::{qualify, AlignedTruth, GroundTruth, TruthSession, NOISE_LABEL};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MetricsError {
    #[error("labelings differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("rand index needs at least 2 items, got {0}")]
    TooFew(usize),
    #[error("ground truth mismatch: {0}")]
    TruthMismatch(String),
    #[error("invalid ground truth: {0}")]
    InvalidTruth(String),
}

fn pairs(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Fraction of unordered item pairs on which both labelings agree about
/// "same cluster" versus "different cluster". Labels are compared as given,
/// so a noise label acts as one more class.
pub fn rand_index<P: Ord, T: Ord>(pred: &[P], truth: &[T]) -> Result<f64, MetricsError> {
    if pred.len() != truth.len() {
        return Err(MetricsError::LengthMismatch(pred.len(), truth.len()));
    }
    let n = pred.len();
    if n < 2 {
        return Err(MetricsError::TooFew(n));
    }
    let mut joint: BTreeMap<(&P, &T), u64> = BTreeMap::new();
    let mut by_pred: BTreeMap<&P, u64> = BTreeMap::new();
    let mut by_truth: BTreeMap<&T, u64> = BTreeMap::new();
    for (p, t) in pred.iter().zip(truth) {
        *joint.entry((p, t)).or_default() += 1;
        *by_pred.entry(p).or_default() += 1;
        *by_truth.entry(t).or_default() += 1;
    }
    let tp: u64 = joint.values().map(|&c| pairs(c)).sum();
    let same_pred: u64 = by_pred.values().map(|&c| pairs(c)).sum();
    let same_truth: u64 = by_truth.values().map(|&c| pairs(c)).sum();
    let total = pairs(n as u64);
    let tn = total + tp - same_pred - same_truth;
    Ok((tp + tn) as f64 / total as f64)
}

/// Most frequent truth label per predicted label; ties go to the smaller
/// truth label.
pub fn majority_labels<P, T>(pred: &[P], truth: &[T]) -> Result<BTreeMap<P, T>, MetricsError>
where
    P: Ord + Clone,
    T: Ord + Clone,
{
    if pred.len() != truth.len() {
        return Err(MetricsError::LengthMismatch(pred.len(), truth.len()));
    }
    let mut votes: BTreeMap<&P, BTreeMap<&T, usize>> = BTreeMap::new();
    for (p, t) in pred.iter().zip(truth) {
        *votes.entry(p).or_default().entry(t).or_default() += 1;
    }
    Ok(votes
        .into_iter()
        .map(|(p, v)| {
            // BTreeMap iterates ascending; strict > keeps the first maximum
            let mut best: Option<(&T, usize)> = None;
            for (t, c) in v {
                if best.is_none_or(|(_, b)| c > b) {
                    best = Some((t, c));
                }
            }
            (p.clone(), best.expect("non-empty vote").0.clone())
        })
        .collect())
}
