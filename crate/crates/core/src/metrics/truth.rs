use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::ingest::FlowKey;
use crate::psm::Psm;

/// Truth format name of injected noise messages.
pub const NOISE_LABEL: &str = "noise";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthSession {
    pub index: usize,
    pub key: FlowKey,
    pub protocol: String,
    /// Format name of each message, in session order.
    pub formats: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub sessions: Vec<TruthSession>,
    pub reference_psms: BTreeMap<String, Psm>,
}

/// Truth labels laid out in the order of an inferred session list.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedTruth {
    /// `protocol:format` per message, or [`NOISE_LABEL`].
    pub message_labels: Vec<String>,
    pub session_labels: Vec<String>,
}

pub fn qualify(protocol: &str, format: &str) -> String {
    if format == NOISE_LABEL {
        NOISE_LABEL.to_string()
    } else {
        format!("{protocol}:{format}")
    }
}

impl GroundTruth {
    pub fn from_json(json: &str) -> Result<GroundTruth, MetricsError> {
        let t: GroundTruth =
            serde_json::from_str(json).map_err(|e| MetricsError::InvalidTruth(e.to_string()))?;
        t.validate()?;
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("truth serializes")
    }

    pub fn validate(&self) -> Result<(), MetricsError> {
        let mut keys = BTreeSet::new();
        for s in &self.sessions {
            if !keys.insert(s.key) {
                return Err(MetricsError::InvalidTruth(format!(
                    "duplicate session {}",
                    s.key
                )));
            }
        }
        for (name, psm) in &self.reference_psms {
            psm.validate()
                .map_err(|e| MetricsError::InvalidTruth(format!("reference psm {name}: {e}")))?;
        }
        Ok(())
    }

    /// Looks up every inferred session by key. `sessions` lists each
    /// session's key and message count.
    pub fn align(&self, sessions: &[(FlowKey, usize)]) -> Result<AlignedTruth, MetricsError> {
        let by_key: BTreeMap<FlowKey, &TruthSession> =
            self.sessions.iter().map(|s| (s.key, s)).collect();
        let mut message_labels = Vec::new();
        let mut session_labels = Vec::with_capacity(sessions.len());
        for (key, count) in sessions {
            let t = by_key.get(key).ok_or_else(|| {
                MetricsError::TruthMismatch(format!("session {key} not in truth"))
            })?;
            if t.formats.len() != *count {
                return Err(MetricsError::TruthMismatch(format!(
                    "session {key} has {count} messages but truth lists {}",
                    t.formats.len()
                )));
            }
            message_labels.extend(t.formats.iter().map(|f| qualify(&t.protocol, f)));
            session_labels.push(t.protocol.clone());
        }
        Ok(AlignedTruth {
            message_labels,
            session_labels,
        })
    }

    /// Reference machine of `protocol` with labels qualified like
    /// [`AlignedTruth::message_labels`].
    pub fn reference(&self, protocol: &str) -> Option<Psm> {
        self.reference_psms
            .get(protocol)
            .map(|p| p.map_labels(|l| qualify(protocol, l)))
    }
}
