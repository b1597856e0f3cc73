//! Trace loading, known-protocol filtering and session slicing.
//!
//! A trace is read into [`RawPacket`]s in capture order. Packets matching a
//! [`KnownProtocolModel`] are discarded together with empty payloads, and the
//! remainder is sliced into bidirectional [`Session`]s whose [`Message`]s are
//! the unknown-protocol input to the rest of the pipeline.

mod jsonl;
mod known;
mod pcap;
mod session;

use std::fmt;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use jsonl::{parse_jsonl, write_jsonl, JsonlRecord};
pub use known::{filter_known, load_models, KnownProtocolModel, Signature};
pub use pcap::parse_pcap;
pub use session::slice_sessions;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed record {index}: {reason}")]
    Malformed { index: usize, reason: String },
    #[error("bad pcap header: {0}")]
    PcapHeader(String),
    #[error("unsupported pcap link type {0} (only Ethernet is decoded)")]
    LinkType(u32),
    #[error("invalid known-protocol models: {0}")]
    Models(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transport {
    Tcp,
    Udp,
}

impl fmt::Display for Transport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transport::Tcp => f.write_str("tcp"),
            Transport::Udp => f.write_str("udp"),
        }
    }
}

impl FromStr for Transport {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tcp" => Ok(Transport::Tcp),
            "udp" => Ok(Transport::Udp),
            other => Err(format!("unknown transport {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FiveTuple {
    pub src: SocketAddr,
    pub dst: SocketAddr,
    pub transport: Transport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawPacket {
    /// Capture time in fractional seconds.
    pub timestamp: f64,
    pub five_tuple: FiveTuple,
    /// Transport payload only; may be empty.
    pub payload: Vec<u8>,
}

/// Canonical bidirectional flow key: the endpoint pair in sorted order plus
/// the transport, so both directions of a conversation share one key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FlowKey {
    pub low: SocketAddr,
    pub high: SocketAddr,
    pub transport: Transport,
}

impl FlowKey {
    pub fn new(a: SocketAddr, b: SocketAddr, transport: Transport) -> Self {
        let (low, high) = if a <= b { (a, b) } else { (b, a) };
        FlowKey {
            low,
            high,
            transport,
        }
    }

    pub fn of(t: &FiveTuple) -> Self {
        FlowKey::new(t.src, t.dst, t.transport)
    }
}

impl fmt::Display for FlowKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}<->{}/{}", self.low, self.high, self.transport)
    }
}

impl FromStr for FlowKey {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (pair, transport) = s
            .rsplit_once('/')
            .ok_or_else(|| format!("flow key {s:?} lacks a transport"))?;
        let (a, b) = pair
            .split_once("<->")
            .ok_or_else(|| format!("flow key {s:?} lacks an endpoint pair"))?;
        let a: SocketAddr = a.parse().map_err(|e| format!("{a:?}: {e}"))?;
        let b: SocketAddr = b.parse().map_err(|e| format!("{b:?}: {e}"))?;
        Ok(FlowKey::new(a, b, transport.parse()?))
    }
}

impl Serialize for FlowKey {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FlowKey {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Initiator,
    Responder,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Message {
    pub session_key: FlowKey,
    pub direction: Direction,
    pub index_in_session: usize,
    pub bytes: Vec<u8>,
    pub timestamp: f64,
}

impl AsRef<[u8]> for Message {
    fn as_ref(&self) -> &[u8] {
        &self.bytes
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    pub key: FlowKey,
    pub messages: Vec<Message>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceFormat {
    Pcap,
    Jsonl,
}

impl TraceFormat {
    /// `.pcap`/`.cap` files are pcap; anything else is treated as JSONL.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("pcap") | Some("cap") => TraceFormat::Pcap,
            _ => TraceFormat::Jsonl,
        }
    }
}

pub fn load_trace(path: &Path, format: TraceFormat) -> Result<Vec<RawPacket>, IngestError> {
    let bytes = std::fs::read(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    match format {
        TraceFormat::Pcap => parse_pcap(&bytes),
        TraceFormat::Jsonl => {
            let text = String::from_utf8(bytes).map_err(|e| IngestError::Malformed {
                index: 0,
                reason: format!("trace is not UTF-8: {e}"),
            })?;
            parse_jsonl(&text)
        }
    }
}

/// All messages of all sessions, flattened in session order.
pub fn flatten_messages(sessions: &[Session]) -> Vec<&Message> {
    sessions.iter().flat_map(|s| s.messages.iter()).collect()
}
