//! Protocol message format and state machine inference from network traces.

pub mod distance;
pub mod format_cluster;
pub mod ingest;
pub mod metrics;
pub mod mfi;
pub mod pipeline;
pub mod psm;
pub mod session_cluster;
pub mod synth;

mod serde_util;

pub use distance::DistanceMatrix;
pub use format_cluster::{acda, AcdaConfig, FeatureVector, PfcLabeling};
pub use ingest::{Direction, FlowKey, Message, RawPacket, Session};
pub use mfi::{extract_mfi, FrequentItem, MfiConfig};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineError};
pub use psm::{Psm, PsmThresholds};
pub use session_cluster::{cluster_sessions, SessionClustering, SessionSequence};
