use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::SynthError;
use crate::psm::{Psm, Role};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FillerKind {
    /// Bytes 0x80..=0xff.
    #[default]
    High,
    /// ASCII a..=z.
    Lower,
    /// Any byte value.
    Any,
}

impl FillerKind {
    pub fn alphabet(self) -> (u8, u8) {
        match self {
            FillerKind::High => (0x80, 0xff),
            FillerKind::Lower => (b'a', b'z'),
            FillerKind::Any => (0x00, 0xff),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatRole {
    Client,
    Server,
}

impl From<FormatRole> for Role {
    fn from(r: FormatRole) -> Self {
        match r {
            FormatRole::Client => Role::Client,
            FormatRole::Server => Role::Server,
        }
    }
}

/// Message template: `magic`, an optional big-endian u16 filler length, then
/// random filler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormatSpec {
    pub name: String,
    pub role: FormatRole,
    #[serde(with = "hex_bytes")]
    pub magic_hex: Vec<u8>,
    pub filler_len_range: (usize, usize),
    #[serde(default)]
    pub length_field: bool,
    #[serde(default)]
    pub filler: FillerKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSpec {
    pub name: String,
    pub formats: Vec<FormatSpec>,
    pub psm: Psm,
    /// Inclusive bounds on messages per session.
    pub session_len: (usize, usize),
    #[serde(default)]
    pub port: Option<u16>,
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

const BUILTIN: &[(&str, &str)] = &[
    ("tlsish", include_str!("../../specs/tlsish.json")),
    ("smtpish", include_str!("../../specs/smtpish.json")),
];

impl ProtocolSpec {
    pub fn from_json(json: &str) -> Result<ProtocolSpec, SynthError> {
        let spec: ProtocolSpec =
            serde_json::from_str(json).map_err(|e| SynthError::Spec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// A bundled spec by name.
    pub fn builtin(name: &str) -> Option<ProtocolSpec> {
        BUILTIN
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, json)| ProtocolSpec::from_json(json).expect("bundled spec is valid"))
    }

    pub fn builtin_names() -> impl Iterator<Item = &'static str> {
        BUILTIN.iter().map(|(n, _)| *n)
    }

    pub fn format(&self, name: &str) -> Option<&FormatSpec> {
        self.formats.iter().find(|f| f.name == name)
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::Spec(format!("{}: {m}", self.name)));
        let mut names = BTreeSet::new();
        for f in &self.formats {
            if !names.insert(f.name.as_str()) {
                return bad(format!("duplicate format {}", f.name));
            }
            if f.name == crate::metrics::NOISE_LABEL {
                return bad("format name is reserved".into());
            }
            let (lo, hi) = f.filler_len_range;
            if lo > hi || hi > u16::MAX as usize {
                return bad(format!("format {} has filler range {lo}..={hi}", f.name));
            }
            if f.magic_hex.is_empty() && hi == 0 {
                return bad(format!("format {} renders empty messages", f.name));
            }
        }
        let (lo, hi) = self.session_len;
        if lo == 0 || lo > hi {
            return bad(format!("session length bounds {lo}..={hi}"));
        }
        self.psm
            .validate()
            .map_err(|e| SynthError::Spec(format!("{}: {e}", self.name)))?;

        let start = self.psm.start().expect("validated").id.clone();
        let end = self.psm.end().expect("validated").id.clone();
        for t in &self.psm.transitions {
            match (&t.label, t.to == end) {
                (None, true) => {}
                (Some(l), false) => {
                    let Some(f) = self.format(l) else {
                        return bad(format!("transition label {l} is not a declared format"));
                    };
                    if t.from == start && f.role != FormatRole::Client {
                        return bad(format!("session may open with server format {l}"));
                    }
                }
                (Some(_), true) => return bad("transitions into end carry no label".into()),
                (None, false) => {
                    return bad(format!("transition {} -> {} lacks a label", t.from, t.to))
                }
            }
        }
        let mut sums: BTreeMap<&str, f64> = BTreeMap::new();
        for t in &self.psm.transitions {
            *sums.entry(t.from.as_str()).or_default() += t.p;
        }
        for (state, sum) in &sums {
            if (sum - 1.0).abs() > 1e-9 {
                return bad(format!("outgoing probabilities of {state} sum to {sum}"));
            }
        }
        if !reaches_end(&self.psm) {
            return Err(SynthError::NoPath(self.name.clone()));
        }
        Ok(())
    }
}

fn reaches_end(psm: &Psm) -> bool {
    let Some(start) = psm.start() else {
        return false;
    };
    let mut seen = BTreeSet::from([start.id.as_str()]);
    let mut queue = VecDeque::from([start.id.as_str()]);
    while let Some(s) = queue.pop_front() {
        if psm.state(s).is_some_and(|st| st.role == Role::End) {
            return true;
        }
        for t in psm.outgoing(s) {
            if seen.insert(t.to.as_str()) {
                queue.push_back(t.to.as_str());
            }
        }
    }
    false
}
