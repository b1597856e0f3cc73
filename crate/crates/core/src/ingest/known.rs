use serde::{Deserialize, Serialize};

use super::{IngestError, RawPacket};

/// Declarative description of a known protocol. A packet belongs to the
/// protocol when either endpoint port is listed or any signature matches.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownProtocolModel {
    pub name: String,
    #[serde(default)]
    pub ports: Vec<u16>,
    #[serde(default)]
    pub signatures: Vec<Signature>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub offset: usize,
    #[serde(with = "hex_bytes", rename = "bytes_hex")]
    pub bytes: Vec<u8>,
}

mod hex_bytes {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(b: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(b))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(d)?;
        hex::decode(s).map_err(serde::de::Error::custom)
    }
}

impl KnownProtocolModel {
    pub fn matches(&self, p: &RawPacket) -> bool {
        let (sp, dp) = (p.five_tuple.src.port(), p.five_tuple.dst.port());
        if self.ports.iter().any(|&port| port == sp || port == dp) {
            return true;
        }
        self.signatures.iter().any(|sig| {
            p.payload
                .get(sig.offset..sig.offset + sig.bytes.len())
                .is_some_and(|window| window == sig.bytes.as_slice())
        })
    }
}

pub fn load_models(json: &str) -> Result<Vec<KnownProtocolModel>, IngestError> {
    let models: Vec<KnownProtocolModel> =
        serde_json::from_str(json).map_err(|e| IngestError::Models(e.to_string()))?;
    if let Some(m) = models
        .iter()
        .find(|m| m.signatures.iter().any(|s| s.bytes.is_empty()))
    {
        return Err(IngestError::Models(format!(
            "model {:?} has an empty signature",
            m.name
        )));
    }
    Ok(models)
}

/// Keeps packets that match no model and carry a non-empty payload.
pub fn filter_known(packets: Vec<RawPacket>, models: &[KnownProtocolModel]) -> Vec<RawPacket> {
    packets
        .into_iter()
        .filter(|p| !p.payload.is_empty() && !models.iter().any(|m| m.matches(p)))
        .collect()
}
