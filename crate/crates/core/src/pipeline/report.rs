use serde::{Deserialize, Serialize};

use super::PipelineConfig;
use crate::format_cluster::{AcdaConfig, PfcLabeling};
use crate::metrics::{
    majority_labels, rand_index, smc, tmc, GroundTruth, MetricsError, NOISE_LABEL,
};
use crate::psm::Psm;
use crate::session_cluster::{AlignmentParams, SessionClustering, SessionSequence};

/// Run parameters without any paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub ms: f64,
    pub acda: AcdaConfig,
    pub alignment: AlignmentParams,
    pub t_ps: f64,
    pub t_pt: f64,
    pub seed: u64,
}

impl From<&PipelineConfig> for Parameters {
    fn from(c: &PipelineConfig) -> Self {
        Parameters {
            ms: c.ms,
            acda: c.acda.clone(),
            alignment: c.alignment,
            t_ps: c.t_ps,
            t_pt: c.t_pt,
            seed: c.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolScore {
    pub cluster: usize,
    pub protocol: String,
    pub smc: f64,
    pub tmc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selected {
    pub eps: f64,
    pub minpts: usize,
    pub format_clusters: usize,
    pub format_sc: f64,
    pub session_k: usize,
    pub session_sc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub format_ri: f64,
    pub session_ri: f64,
    pub per_protocol: Vec<ProtocolScore>,
    pub selected: Selected,
    pub parameters: Parameters,
    pub method: Vec<String>,
}

const METHOD: &[&str] = &[
    "transition probabilities are state probabilities over the noise-filtered counts",
    "format labels map to the majority truth format of their cluster; noise messages form one class in both rand indices",
    "session clusters map to their majority truth protocol",
    "states are matched one-to-one by optimal assignment over role-compatible pairs scored by Dice overlap of incident transition labels; start and end states are excluded from SMC and TMC",
];

/// Scores a finished run against ground truth.
pub fn evaluate(
    sequences: &[SessionSequence],
    sessions: &SessionClustering,
    psms: &[Psm],
    truth: &GroundTruth,
    parameters: &Parameters,
    pfc: &PfcLabeling,
) -> Result<EvalReport, MetricsError> {
    let shape: Vec<_> = sequences
        .iter()
        .map(|s| (s.session_key, s.tokens.len()))
        .collect();
    let aligned = truth.align(&shape)?;
    let pred: Vec<Option<usize>> = sequences
        .iter()
        .flat_map(|s| s.tokens.iter().copied())
        .collect();

    let format_ri = rand_index(&pred, &aligned.message_labels)?;
    let session_ri = rand_index(&sessions.labels, &aligned.session_labels)?;

    let format_names = majority_labels(&pred, &aligned.message_labels)?;
    let protocols = majority_labels(&sessions.labels, &aligned.session_labels)?;

    let mut per_protocol = Vec::with_capacity(psms.len());
    for (c, psm) in psms.iter().enumerate() {
        let Some(protocol) = protocols.get(&c) else {
            continue;
        };
        let reference = truth.reference(protocol).ok_or_else(|| {
            MetricsError::TruthMismatch(format!("no reference machine for protocol {protocol}"))
        })?;
        let renamed = psm.map_labels(|l| {
            l.parse::<usize>()
                .ok()
                .and_then(|id| format_names.get(&Some(id)))
                .cloned()
                .unwrap_or_else(|| NOISE_LABEL.to_string())
        });
        per_protocol.push(ProtocolScore {
            cluster: c,
            protocol: protocol.clone(),
            smc: smc(&renamed, &reference),
            tmc: tmc(&renamed, &reference),
        });
    }

    Ok(EvalReport {
        format_ri,
        session_ri,
        per_protocol,
        selected: Selected {
            eps: pfc.eps,
            minpts: pfc.minpts,
            format_clusters: pfc.clusters,
            format_sc: pfc.sc,
            session_k: sessions.k,
            session_sc: sessions.sc,
        },
        parameters: parameters.clone(),
        method: METHOD.iter().map(|s| s.to_string()).collect(),
    })
}
