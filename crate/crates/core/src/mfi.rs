//! Maximum frequent itemset of contiguous byte patterns.
//!
//! Items have lengths 1, 2, 4 and 8. Support is per-message presence: the
//! fraction of messages containing the item as a contiguous substring.
//! Length-2L candidates are built only from windows whose two halves are
//! frequent length-L items, which by anti-monotonicity loses nothing. Items
//! contained in a longer frequent item are dropped at the end.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

/// Item lengths mined, in increasing order.
pub const ITEM_LENGTHS: [usize; 4] = [1, 2, 4, 8];
/// Messages are truncated to this many bytes before mining.
pub const MINING_PREFIX: usize = 2048;
pub const DEFAULT_MIN_SUPPORT: f64 = 0.35;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MfiError {
    #[error("message set is empty")]
    NoMessages,
    #[error("minimum support {0} outside (0, 1)")]
    InvalidSupport(f64),
    #[error("empty MFI: no item reaches minimum support {0}")]
    EmptyMfi(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequentItem {
    #[serde(with = "hex_bytes", rename = "bytes_hex")]
    pub bytes: Vec<u8>,
    pub support: f64,
}

mod hex_bytes {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(b: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(b))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        hex::decode(String::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MfiConfig {
    pub min_support: f64,
}

impl Default for MfiConfig {
    fn default() -> Self {
        MfiConfig {
            min_support: DEFAULT_MIN_SUPPORT,
        }
    }
}

impl MfiConfig {
    pub fn new(min_support: f64) -> Result<Self, MfiError> {
        if !(min_support > 0.0 && min_support < 1.0) {
            return Err(MfiError::InvalidSupport(min_support));
        }
        Ok(MfiConfig { min_support })
    }
}

pub(crate) fn contains(haystack: &[u8], needle: &[u8]) -> bool {
    needle.is_empty() || haystack.windows(needle.len()).any(|w| w == needle)
}

/// Fraction of messages containing `item` contiguously.
pub fn support<M: AsRef<[u8]>>(item: &[u8], messages: &[M]) -> Result<f64, MfiError> {
    if messages.is_empty() {
        return Err(MfiError::NoMessages);
    }
    let hits = messages
        .iter()
        .filter(|m| contains(m.as_ref(), item))
        .count();
    Ok(hits as f64 / messages.len() as f64)
}

/// Extracts the MFI, sorted by descending length, descending support, then
/// bytes.
pub fn extract_mfi<M: AsRef<[u8]>>(
    messages: &[M],
    cfg: &MfiConfig,
) -> Result<Vec<FrequentItem>, MfiError> {
    if messages.is_empty() {
        return Err(MfiError::NoMessages);
    }
    MfiConfig::new(cfg.min_support)?;
    let n = messages.len();
    let prefixes: Vec<&[u8]> = messages
        .iter()
        .map(|m| {
            let b = m.as_ref();
            &b[..b.len().min(MINING_PREFIX)]
        })
        .collect();
    let is_frequent = |count: usize| count as f64 / n as f64 >= cfg.min_support;

    let mut levels: Vec<HashMap<Vec<u8>, usize>> = Vec::with_capacity(ITEM_LENGTHS.len());
    for &len in &ITEM_LENGTHS {
        let prev = levels.last();
        let mut counts: HashMap<Vec<u8>, usize> = HashMap::new();
        for msg in &prefixes {
            let mut seen: HashSet<&[u8]> = HashSet::new();
            for w in msg.windows(len) {
                let admissible = match prev {
                    None => true,
                    Some(p) => {
                        let half = len / 2;
                        p.contains_key(&w[..half]) && p.contains_key(&w[half..])
                    }
                };
                if admissible {
                    seen.insert(w);
                }
            }
            for w in seen {
                *counts.entry(w.to_vec()).or_insert(0) += 1;
            }
        }
        counts.retain(|_, c| is_frequent(*c));
        let exhausted = counts.is_empty();
        levels.push(counts);
        if exhausted {
            break;
        }
    }

    let mut items: Vec<(Vec<u8>, usize)> = levels.into_iter().flat_map(|l| l.into_iter()).collect();
    let longer: Vec<Vec<u8>> = items.iter().map(|(b, _)| b.clone()).collect();
    items.retain(|(b, _)| !longer.iter().any(|o| o.len() > b.len() && contains(o, b)));
    items.sort_by(|a, b| {
        b.0.len()
            .cmp(&a.0.len())
            .then(b.1.cmp(&a.1))
            .then(a.0.cmp(&b.0))
    });
    if items.is_empty() {
        return Err(MfiError::EmptyMfi(cfg.min_support));
    }
    Ok(items
        .into_iter()
        .map(|(bytes, c)| FrequentItem {
            bytes,
            support: c as f64 / n as f64,
        })
        .collect())
}
