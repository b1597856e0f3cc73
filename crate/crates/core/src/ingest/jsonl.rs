use std::net::SocketAddr;

use serde::{Deserialize, Serialize};

use super::{FiveTuple, IngestError, RawPacket, Transport};

/// One line of a JSONL trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonlRecord {
    pub ts: f64,
    pub src: SocketAddr,
    pub dst: SocketAddr,
    pub proto: Transport,
    pub payload_hex: String,
}

impl JsonlRecord {
    pub fn from_packet(p: &RawPacket) -> Self {
        JsonlRecord {
            ts: p.timestamp,
            src: p.five_tuple.src,
            dst: p.five_tuple.dst,
            proto: p.five_tuple.transport,
            payload_hex: hex::encode(&p.payload),
        }
    }

    fn into_packet(self, index: usize) -> Result<RawPacket, IngestError> {
        let payload = hex::decode(&self.payload_hex).map_err(|e| IngestError::Malformed {
            index,
            reason: format!("payload_hex: {e}"),
        })?;
        Ok(RawPacket {
            timestamp: self.ts,
            five_tuple: FiveTuple {
                src: self.src,
                dst: self.dst,
                transport: self.proto,
            },
            payload,
        })
    }
}

/// Parses a JSONL trace. Blank lines are skipped; record indices in errors
/// are zero-based line numbers.
pub fn parse_jsonl(text: &str) -> Result<Vec<RawPacket>, IngestError> {
    let mut out = Vec::new();
    for (index, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: JsonlRecord = serde_json::from_str(line).map_err(|e| IngestError::Malformed {
            index,
            reason: e.to_string(),
        })?;
        out.push(rec.into_packet(index)?);
    }
    Ok(out)
}

pub fn write_jsonl(packets: &[RawPacket]) -> String {
    let mut out = String::new();
    for p in packets {
        out.push_str(
            &serde_json::to_string(&JsonlRecord::from_packet(p)).expect("record serializes"),
        );
        out.push('\n');
    }
    out
}
