//! Session clustering by protocol.
//!
//! Each session becomes the sequence of its messages' format-cluster labels.
//! Pairwise distances come from NW alignment similarity normalized by the
//! combined length; K-Medoids is run for every candidate k and the
//! clustering with the highest silhouette wins.

mod align;
mod kmedoids;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use align::{nw_similarity, AlignmentParams};
pub use kmedoids::{greedy_init, kmedoids, KMedoids, MAX_ROUNDS};

use crate::distance::{silhouette, DistanceMatrix};
use crate::format_cluster::PfcLabeling;
use crate::ingest::{FlowKey, Session};
use crate::serde_util::noise_labels;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SessionError {
    #[error("labeling covers {labeled} messages but sessions hold {messages}")]
    LabelMismatch { labeled: usize, messages: usize },
    #[error("need at least 2 sessions, got {0}")]
    TooFewSessions(usize),
    #[error("invalid alignment parameters: {0}")]
    Params(String),
    #[error("k-medoids: {0}")]
    KMedoids(String),
    #[error("no valid cluster count in 1..={0}")]
    AllInvalid(usize),
}

/// A session rendered as format-cluster tokens; `None` is the noise token.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSequence {
    pub session_key: FlowKey,
    #[serde(with = "noise_labels")]
    pub tokens: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionClustering {
    pub k: usize,
    /// Silhouette of the chosen clustering; `None` only for the k = 1
    /// fallback.
    pub sc: Option<f64>,
    pub labels: Vec<usize>,
    pub medoids: Vec<usize>,
}

/// Labels each session's messages with the format clusters of `pfc`, whose
/// labels follow the flattened session order.
pub fn label_sessions(
    sessions: &[Session],
    pfc: &PfcLabeling,
) -> Result<Vec<SessionSequence>, SessionError> {
    let messages: usize = sessions.iter().map(|s| s.messages.len()).sum();
    if messages != pfc.labels.len() {
        return Err(SessionError::LabelMismatch {
            labeled: pfc.labels.len(),
            messages,
        });
    }
    let mut labels = pfc.labels.iter().copied();
    Ok(sessions
        .iter()
        .map(|s| SessionSequence {
            session_key: s.key,
            tokens: labels.by_ref().take(s.messages.len()).collect(),
        })
        .collect())
}

/// `1 - 2 * similarity / (len a + len b)`; 0 when both are empty.
pub fn session_distance(a: &SessionSequence, b: &SessionSequence, p: &AlignmentParams) -> f64 {
    token_distance(&a.tokens, &b.tokens, p)
}

pub(crate) fn token_distance(a: &[Option<usize>], b: &[Option<usize>], p: &AlignmentParams) -> f64 {
    let total = a.len() + b.len();
    if total == 0 {
        return 0.0;
    }
    1.0 - 2.0 * nw_similarity(a, b, p) as f64 / total as f64
}

pub fn session_distances(seqs: &[SessionSequence], p: &AlignmentParams) -> DistanceMatrix {
    DistanceMatrix::from_fn(seqs.len(), |i, j| session_distance(&seqs[i], &seqs[j], p))
}

/// Runs K-Medoids for k in `1..=pfc_count` and keeps the best silhouette.
///
/// k = 1 and k = n are skipped while any other k is available; ties favor
/// the smaller k.
pub fn cluster_sessions(
    seqs: &[SessionSequence],
    pfc_count: usize,
    p: &AlignmentParams,
    seed: u64,
) -> Result<SessionClustering, SessionError> {
    p.validate().map_err(SessionError::Params)?;
    if seqs.len() < 2 {
        return Err(SessionError::TooFewSessions(seqs.len()));
    }
    let dist = session_distances(seqs, p);
    cluster_matrix(&dist, pfc_count, seed)
}

pub fn cluster_matrix(
    dist: &DistanceMatrix,
    pfc_count: usize,
    seed: u64,
) -> Result<SessionClustering, SessionError> {
    let n = dist.len();
    let top = pfc_count.min(n);
    let candidates: Vec<usize> = (2..=top).filter(|&k| k < n).collect();
    let runs: Vec<(usize, KMedoids, Option<f64>)> = candidates
        .par_iter()
        .map(|&k| {
            let r = kmedoids(dist, k, seed).expect("k within 1..=n");
            let labels: Vec<Option<usize>> = r.labels.iter().map(|&l| Some(l)).collect();
            let sc = silhouette(dist, &labels);
            (k, r, sc)
        })
        .collect();

    let mut best: Option<(usize, KMedoids, f64)> = None;
    for (k, r, sc) in runs {
        let Some(sc) = sc else { continue };
        if best.as_ref().is_none_or(|b| sc > b.2) {
            best = Some((k, r, sc));
        }
    }
    match best {
        Some((k, r, sc)) => Ok(SessionClustering {
            k,
            sc: Some(sc),
            labels: r.labels,
            medoids: r.medoids,
        }),
        None if top >= 1 => {
            let r = kmedoids(dist, 1, seed).map_err(SessionError::KMedoids)?;
            Ok(SessionClustering {
                k: 1,
                sc: None,
                labels: r.labels,
                medoids: r.medoids,
            })
        }
        None => Err(SessionError::AllInvalid(pfc_count)),
    }
}
