//! Protocol format clustering: fuzzy-membership features over the MFI,
//! clustered by an auto-converging DBSCAN search (ACDA).
//!
//! Each ACDA iteration scans a fixed `(eps, minpts)` grid at the current step
//! sizes and scores every cell by silhouette. The improvement over the best
//! score seen so far drives the step sizes: a real improvement widens them,
//! a stall shrinks them. The loop stops on a stall after the second
//! iteration, or at `max_iters`.

mod dbscan;
mod features;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use dbscan::{dbscan_indexed, dbscan_matrix, NeighborIndex};
pub use features::{euclid, feature_vectors, lcss_len, membership, FeatureVector};

use crate::distance::{silhouette as silhouette_matrix, DistanceMatrix};

/// Score assigned to grid cells whose silhouette is undefined.
pub const INVALID_SC: f64 = -1.0;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FormatError {
    #[error("MFI is empty")]
    EmptyMfi,
    #[error("feature vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("invalid ACDA configuration: {0}")]
    Config(String),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("no clustering found: every grid cell produced fewer than two clusters")]
    NoClustering,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AcdaConfig {
    pub eps_range: (f64, f64),
    pub minpts_range: (usize, usize),
    pub eps_step: f64,
    pub minpts_step: usize,
    pub tol: f64,
    /// Upper bound on the eps step.
    pub alpha: f64,
    /// Lower bound on the eps step.
    pub beta: f64,
    /// Upper bound on the minpts step.
    pub gamma: usize,
    /// Lower bound on the minpts step.
    pub lambda: usize,
    pub max_iters: usize,
}

impl Default for AcdaConfig {
    fn default() -> Self {
        AcdaConfig {
            eps_range: (0.1, 2.0),
            minpts_range: (5, 50),
            eps_step: 0.1,
            minpts_step: 5,
            tol: 0.01,
            alpha: 0.5,
            beta: 0.01,
            gamma: 10,
            lambda: 1,
            max_iters: 10,
        }
    }
}

impl AcdaConfig {
    pub fn validate(&self) -> Result<(), FormatError> {
        let bad = |m: &str| Err(FormatError::Config(m.to_string()));
        let (emin, emax) = self.eps_range;
        let (pmin, pmax) = self.minpts_range;
        if !(emin > 0.0 && emin < emax) {
            return bad("eps range must satisfy 0 < min < max");
        }
        if !(pmin >= 1 && pmin < pmax) {
            return bad("minpts range must satisfy 1 <= min < max");
        }
        if !(self.beta > 0.0 && self.beta <= self.eps_step && self.eps_step <= self.alpha) {
            return bad("eps step must satisfy 0 < beta <= step <= alpha");
        }
        if !(self.lambda >= 1 && self.lambda <= self.minpts_step && self.minpts_step <= self.gamma)
        {
            return bad("minpts step must satisfy 1 <= lambda <= step <= gamma");
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return bad("tol must be positive");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1");
        }
        Ok(())
    }
}

/// Format-cluster assignment: one label per message, `None` for noise.
#[derive(Debug, Clone, PartialEq)]
pub struct PfcLabeling {
    pub labels: Vec<Option<usize>>,
    pub clusters: usize,
    pub eps: f64,
    pub minpts: usize,
    pub sc: f64,
}

impl PfcLabeling {
    pub fn new(labels: Vec<Option<usize>>, eps: f64, minpts: usize, sc: f64) -> Self {
        let clusters = labels.iter().flatten().max().map_or(0, |m| m + 1);
        PfcLabeling {
            labels,
            clusters,
            eps,
            minpts,
            sc,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PfcDump {
    #[serde(with = "crate::serde_util::noise_labels")]
    labels: Vec<Option<usize>>,
    eps: f64,
    minpts: usize,
    sc: f64,
}

impl Serialize for PfcLabeling {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PfcDump {
            labels: self.labels.clone(),
            eps: self.eps,
            minpts: self.minpts,
            sc: self.sc,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PfcLabeling {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let dump = PfcDump::deserialize(d)?;
        Ok(PfcLabeling::new(
            dump.labels,
            dump.eps,
            dump.minpts,
            dump.sc,
        ))
    }
}

pub fn distance_matrix(vectors: &[FeatureVector]) -> Result<DistanceMatrix, FormatError> {
    if let Some(first) = vectors.first() {
        if let Some(bad) = vectors.iter().find(|v| v.len() != first.len()) {
            return Err(FormatError::LengthMismatch(first.len(), bad.len()));
        }
    }
    Ok(DistanceMatrix::from_fn(vectors.len(), |i, j| {
        features::euclid_unchecked(&vectors[i].0, &vectors[j].0)
    }))
}

/// Single DBSCAN run; `sc` is the silhouette or [`INVALID_SC`].
pub fn dbscan(
    vectors: &[FeatureVector],
    eps: f64,
    minpts: usize,
) -> Result<PfcLabeling, FormatError> {
    let dist = distance_matrix(vectors)?;
    let labels = dbscan_matrix(&dist, eps, minpts);
    let sc = silhouette_matrix(&dist, &labels).unwrap_or(INVALID_SC);
    Ok(PfcLabeling::new(labels, eps, minpts, sc))
}

/// Silhouette of a labeling, `None` when fewer than two clusters exist.
pub fn silhouette(
    vectors: &[FeatureVector],
    labels: &[Option<usize>],
) -> Result<Option<f64>, FormatError> {
    Ok(silhouette_matrix(&distance_matrix(vectors)?, labels))
}

/// Eps step update: grow on improvement above `tol`, shrink otherwise,
/// always kept inside `[beta, alpha]`.
pub fn next_eps_step(step: f64, imp: f64, tol: f64, alpha: f64, beta: f64) -> f64 {
    let raw = if imp > tol {
        (step * (1.0 + imp)).min(alpha)
    } else {
        (step * (1.0 - imp)).max(beta)
    };
    raw.clamp(beta, alpha)
}

/// Minpts step update, rounded to the nearest integer inside
/// `[lambda, gamma]`.
pub fn next_minpts_step(step: usize, imp: f64, tol: f64, gamma: usize, lambda: usize) -> usize {
    let s = step as f64;
    let raw = if imp > tol {
        (s * (1.0 + imp)).min(gamma as f64)
    } else {
        (s * (1.0 - imp)).max(lambda as f64)
    };
    (raw.round() as usize).clamp(lambda.max(1), gamma.max(1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcdaIteration {
    pub eps_step: f64,
    pub minpts_step: usize,
    /// Best silhouette in this iteration's grid.
    pub iteration_sc: f64,
    pub improvement: f64,
    /// Best silhouette over all iterations so far.
    pub best_sc: f64,
    pub cells: usize,
}

#[derive(Debug, Clone)]
pub struct AcdaRun {
    pub labeling: PfcLabeling,
    pub history: Vec<AcdaIteration>,
}

fn grid(cfg: &AcdaConfig, eps_step: f64, minpts_step: usize) -> Vec<(f64, usize)> {
    let (emin, emax) = cfg.eps_range;
    let (pmin, pmax) = cfg.minpts_range;
    let mut eps_values = Vec::new();
    let mut i = 0usize;
    loop {
        let e = emin + i as f64 * eps_step;
        if e > emax + 1e-9 {
            break;
        }
        eps_values.push(e);
        i += 1;
    }
    let minpts_values: Vec<usize> = (pmin..=pmax).step_by(minpts_step.max(1)).collect();
    eps_values
        .iter()
        .flat_map(|&e| minpts_values.iter().map(move |&p| (e, p)))
        .collect()
}

/// Grid cell result: eps, minpts, silhouette, labels.
type Cell = (f64, usize, Option<f64>, Vec<Option<usize>>);

/// `true` when candidate `a` beats incumbent `b`: higher score, then
/// smaller eps, then smaller minpts.
fn beats(a: (f64, f64, usize), b: (f64, f64, usize)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && (a.1 < b.1 || (a.1 == b.1 && a.2 < b.2)))
}

pub fn acda(vectors: &[FeatureVector], cfg: &AcdaConfig) -> Result<PfcLabeling, FormatError> {
    acda_traced(vectors, cfg).map(|r| r.labeling)
}

pub fn acda_traced(vectors: &[FeatureVector], cfg: &AcdaConfig) -> Result<AcdaRun, FormatError> {
    let dist = distance_matrix(vectors)?;
    acda_matrix(&dist, cfg)
}

/// ACDA over a precomputed distance matrix.
pub fn acda_matrix(dist: &DistanceMatrix, cfg: &AcdaConfig) -> Result<AcdaRun, FormatError> {
    cfg.validate()?;
    if dist.len() < cfg.minpts_range.0 {
        return Err(FormatError::TooFewPoints {
            needed: cfg.minpts_range.0,
            got: dist.len(),
        });
    }
    let index = NeighborIndex::new(dist);
    let mut eps_step = cfg.eps_step;
    let mut minpts_step = cfg.minpts_step;
    let mut best: Option<PfcLabeling> = None;
    let mut previous_sc = INVALID_SC;
    let mut history = Vec::new();

    for iteration in 1..=cfg.max_iters {
        let cells = grid(cfg, eps_step, minpts_step);
        let scored: Vec<Cell> = cells
            .par_iter()
            .map(|&(eps, minpts)| {
                let labels = dbscan_indexed(&index, eps, minpts);
                let sc = silhouette_matrix(dist, &labels);
                (eps, minpts, sc, labels)
            })
            .collect();

        let mut iter_best: Option<usize> = None;
        for (i, cell) in scored.iter().enumerate() {
            let Some(sc) = cell.2 else { continue };
            let better = match iter_best {
                None => true,
                Some(b) => {
                    let inc = &scored[b];
                    beats(
                        (sc, cell.0, cell.1),
                        (inc.2.unwrap_or(INVALID_SC), inc.0, inc.1),
                    )
                }
            };
            if better {
                iter_best = Some(i);
            }
        }
        let iteration_sc = iter_best.map_or(INVALID_SC, |i| scored[i].2.unwrap_or(INVALID_SC));
        let improvement = iteration_sc - previous_sc;

        if let Some(i) = iter_best {
            let (eps, minpts, sc, ref labels) = scored[i];
            let sc = sc.unwrap_or(INVALID_SC);
            let replace = match &best {
                None => true,
                Some(b) => beats((sc, eps, minpts), (b.sc, b.eps, b.minpts)),
            };
            if replace {
                best = Some(PfcLabeling::new(labels.clone(), eps, minpts, sc));
            }
        }
        let best_sc = best.as_ref().map_or(INVALID_SC, |b| b.sc);
        history.push(AcdaIteration {
            eps_step,
            minpts_step,
            iteration_sc,
            improvement,
            best_sc,
            cells: cells.len(),
        });

        if iteration >= 2 && improvement <= cfg.tol {
            break;
        }
        eps_step = next_eps_step(eps_step, improvement, cfg.tol, cfg.alpha, cfg.beta);
        minpts_step = next_minpts_step(minpts_step, improvement, cfg.tol, cfg.gamma, cfg.lambda);
        previous_sc = best_sc;
    }

    best.map(|labeling| AcdaRun { labeling, history })
        .ok_or(FormatError::NoClustering)
}
