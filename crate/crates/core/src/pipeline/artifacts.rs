use std::path::Path;

use serde::de::DeserializeOwned;

use super::{Parameters, PipelineError};
use crate::format_cluster::PfcLabeling;
use crate::mfi::FrequentItem;
use crate::psm::Psm;
use crate::session_cluster::{SessionClustering, SessionSequence};

/// Stage outputs reloaded from an output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub parameters: Parameters,
    pub mfi: Vec<FrequentItem>,
    pub pfc: PfcLabeling,
    pub sequences: Vec<SessionSequence>,
    pub sessions: SessionClustering,
    pub psms: Vec<Psm>,
}

fn read<T: DeserializeOwned>(dir: &Path, name: &str) -> Result<T, PipelineError> {
    let path = dir.join(name);
    let err = |reason: String| PipelineError::Artifact {
        path: path.clone(),
        reason,
    };
    let text = std::fs::read_to_string(&path).map_err(|e| err(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| err(e.to_string()))
}

impl Artifacts {
    pub fn load(dir: &Path) -> Result<Artifacts, PipelineError> {
        let parameters = read(dir, "config.json")?;
        let mfi = read(dir, "mfi.json")?;
        let pfc: PfcLabeling = read(dir, "pfc.json")?;
        let sequences: Vec<SessionSequence> = read(dir, "sequences.json")?;
        let sessions: SessionClustering = read(dir, "sessions.json")?;
        let psms = (0..sessions.k)
            .map(|c| {
                let psm: Psm = read(dir, &format!("psm_{c}.json"))?;
                psm.validate().map_err(|e| PipelineError::Artifact {
                    path: dir.join(format!("psm_{c}.json")),
                    reason: e.to_string(),
                })?;
                Ok(psm)
            })
            .collect::<Result<Vec<_>, PipelineError>>()?;

        let tokens: usize = sequences.iter().map(|s| s.tokens.len()).sum();
        if tokens != pfc.labels.len() || sequences.len() != sessions.labels.len() {
            return Err(PipelineError::Artifact {
                path: dir.to_path_buf(),
                reason: format!(
                    "inconsistent artifacts: {} labels vs {tokens} tokens, {} sessions vs {} session labels",
                    pfc.labels.len(),
                    sequences.len(),
                    sessions.labels.len()
                ),
            });
        }
        Ok(Artifacts {
            parameters,
            mfi,
            pfc,
            sequences,
            sessions,
            psms,
        })
    }
}
