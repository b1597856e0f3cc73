//! End-to-end orchestration with artifact dumps after every stage.
//!
//! Artifacts written to the output directory:
//! `config.json`, `mfi.json`, `pfc.json`, `sequences.json`, `sessions.json`,
//! `psm_<k>.json` / `psm_<k>.dot` per session cluster, and `report.json`
//! when ground truth is supplied.

mod artifacts;
mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use artifacts::Artifacts;
pub use report::{evaluate, EvalReport, Parameters, ProtocolScore};

use crate::format_cluster::{acda, feature_vectors, AcdaConfig, FormatError, PfcLabeling};
use crate::ingest::{
    filter_known, flatten_messages, load_models, load_trace, slice_sessions, IngestError, Session,
    TraceFormat,
};
use crate::metrics::{GroundTruth, MetricsError};
use crate::mfi::{extract_mfi, FrequentItem, MfiConfig, MfiError, DEFAULT_MIN_SUPPORT};
use crate::psm::{
    build_pfts, filter_noise, majority_directions, pfts_to_psm, to_dot, Psm, PsmError,
    PsmThresholds,
};
use crate::session_cluster::{
    cluster_sessions, label_sessions, AlignmentParams, SessionClustering, SessionError,
    SessionSequence,
};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("ingest: {0}")]
    Ingest(#[from] IngestError),
    #[error("mfi: {0}")]
    Mfi(#[from] MfiError),
    #[error("format clustering: {0}")]
    Format(#[from] FormatError),
    #[error("session clustering: {0}")]
    Session(#[from] SessionError),
    #[error("psm inference: {0}")]
    Psm(#[from] PsmError),
    #[error("evaluation: {0}")]
    Eval(#[from] MetricsError),
    #[error("evaluation: artifact {path}: {reason}")]
    Artifact { path: PathBuf, reason: String },
    #[error("writing {path}: {source}")]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl PipelineError {
    pub fn stage(&self) -> &'static str {
        match self {
            PipelineError::Config(_) => "config",
            PipelineError::Ingest(_) => "ingest",
            PipelineError::Mfi(_) => "mfi",
            PipelineError::Format(_) => "format_cluster",
            PipelineError::Session(_) => "session_cluster",
            PipelineError::Psm(_) => "psm_infer",
            PipelineError::Eval(_) | PipelineError::Artifact { .. } => "metrics",
            PipelineError::Output { .. } => "output",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 2,
            PipelineError::Ingest(_) => 3,
            PipelineError::Mfi(_) => 4,
            PipelineError::Format(_) => 5,
            PipelineError::Session(_) => 6,
            PipelineError::Psm(_) => 7,
            PipelineError::Eval(_) | PipelineError::Artifact { .. } => 8,
            PipelineError::Output { .. } => 9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub ms: f64,
    pub acda: AcdaConfig,
    pub alignment: AlignmentParams,
    pub t_ps: f64,
    pub t_pt: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub known_models: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let th = PsmThresholds::default();
        PipelineConfig {
            ms: DEFAULT_MIN_SUPPORT,
            acda: AcdaConfig::default(),
            alignment: AlignmentParams::default(),
            t_ps: th.t_ps,
            t_pt: th.t_pt,
            seed: 0,
            trace: None,
            known_models: None,
            truth: None,
            out_dir: None,
        }
    }
}

impl PipelineConfig {
    pub fn from_json(json: &str) -> Result<Self, PipelineError> {
        serde_json::from_str(json).map_err(|e| PipelineError::Config(e.to_string()))
    }

    pub fn thresholds(&self) -> PsmThresholds {
        PsmThresholds {
            t_ps: self.t_ps,
            t_pt: self.t_pt,
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let cfg = |e: &dyn std::fmt::Display| PipelineError::Config(e.to_string());
        MfiConfig::new(self.ms).map_err(|e| cfg(&e))?;
        self.acda.validate().map_err(|e| cfg(&e))?;
        self.alignment.validate().map_err(|e| cfg(&e))?;
        self.thresholds().validate().map_err(|e| cfg(&e))?;
        Ok(())
    }
}

/// In-memory results of a pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub mfi: Vec<FrequentItem>,
    pub pfc: PfcLabeling,
    pub sequences: Vec<SessionSequence>,
    pub sessions: SessionClustering,
    pub psms: Vec<Psm>,
    pub report: Option<EvalReport>,
}

/// Reads the trace, drops known-protocol traffic and slices sessions.
pub fn ingest(cfg: &PipelineConfig) -> Result<Vec<Session>, PipelineError> {
    let trace = cfg
        .trace
        .as_deref()
        .ok_or_else(|| PipelineError::Config("no trace path given".into()))?;
    let packets = load_trace(trace, TraceFormat::from_path(trace))?;
    let packets = match &cfg.known_models {
        Some(path) => {
            let json = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
                path: path.clone(),
                source,
            })?;
            filter_known(packets, &load_models(&json)?)
        }
        None => packets,
    };
    Ok(slice_sessions(&packets))
}

/// One machine per session cluster, built from that cluster's sessions.
pub fn infer_psms(
    sessions: &[Session],
    sequences: &[SessionSequence],
    clustering: &SessionClustering,
    th: &PsmThresholds,
) -> Result<Vec<Psm>, PipelineError> {
    th.validate()?;
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &c) in clustering.labels.iter().enumerate() {
        members.entry(c).or_default().push(i);
    }
    (0..clustering.k)
        .map(|c| {
            let idx = members.get(&c).map(Vec::as_slice).unwrap_or_default();
            let pfts = filter_noise(&build_pfts(idx.iter().map(|&i| &sequences[i])), th);
            let dirs = majority_directions(idx.iter().flat_map(|&i| {
                sequences[i]
                    .tokens
                    .iter()
                    .zip(&sessions[i].messages)
                    .map(|(t, m)| (*t, m.direction))
            }));
            Ok(pfts_to_psm(&pfts, &dirs)?)
        })
        .collect()
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), PipelineError> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| PipelineError::Output { path, source })
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("artifact serializes");
    s.push('\n');
    s
}

/// Runs every stage, writing each artifact as soon as it exists.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutput, PipelineError> {
    cfg.validate()?;
    let out = cfg
        .out_dir
        .as_deref()
        .ok_or_else(|| PipelineError::Config("no output directory given".into()))?;
    std::fs::create_dir_all(out).map_err(|source| PipelineError::Output {
        path: out.to_path_buf(),
        source,
    })?;
    write(out, "config.json", &json(&Parameters::from(cfg)))?;

    let sessions = ingest(cfg)?;
    let messages = flatten_messages(&sessions);

    let mfi = extract_mfi(&messages, &MfiConfig::new(cfg.ms)?)?;
    write(out, "mfi.json", &json(&mfi))?;

    let vectors = feature_vectors(&messages, &mfi)?;
    let pfc = acda(&vectors, &cfg.acda)?;
    write(out, "pfc.json", &json(&pfc))?;

    let sequences = label_sessions(&sessions, &pfc)?;
    write(out, "sequences.json", &json(&sequences))?;
    let clustering = cluster_sessions(&sequences, pfc.clusters, &cfg.alignment, cfg.seed)?;
    write(out, "sessions.json", &json(&clustering))?;

    let psms = infer_psms(&sessions, &sequences, &clustering, &cfg.thresholds())?;
    for (c, psm) in psms.iter().enumerate() {
        write(out, &format!("psm_{c}.json"), &json(psm))?;
        write(
            out,
            &format!("psm_{c}.dot"),
            &to_dot(psm, &format!("psm_{c}")),
        )?;
    }

    let report = match &cfg.truth {
        Some(path) => Some(evaluate_dir(out, &load_truth(path)?)?),
        None => None,
    };
    Ok(PipelineOutput {
        mfi,
        pfc,
        sequences,
        sessions: clustering,
        psms,
        report,
    })
}

pub fn load_truth(path: &Path) -> Result<GroundTruth, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Artifact {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    Ok(GroundTruth::from_json(&text)?)
}

/// Scores the artifacts in `dir` against `truth` and writes `report.json`.
pub fn evaluate_dir(dir: &Path, truth: &GroundTruth) -> Result<EvalReport, PipelineError> {
    let a = Artifacts::load(dir)?;
    let report = evaluate(
        &a.sequences,
        &a.sessions,
        &a.psms,
        truth,
        &a.parameters,
        &a.pfc,
    )?;
    write(dir, "report.json", &json(&report))?;
    Ok(report)
}
