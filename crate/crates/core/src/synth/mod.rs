//! Labeled mixed-protocol trace generation from reference state machines.

mod spec;

use std::collections::BTreeSet;
use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use spec::{FillerKind, FormatRole, FormatSpec, ProtocolSpec};

use crate::ingest::{write_jsonl, FiveTuple, FlowKey, RawPacket, Transport};
use crate::metrics::{GroundTruth, TruthSession, NOISE_LABEL};

pub const MAX_NOISE_RATE: f64 = 0.2;
const MAX_ATTEMPTS: usize = 10_000;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SynthError {
    #[error("invalid protocol spec: {0}")]
    Spec(String),
    #[error("protocol {0} has no path from start to end")]
    NoPath(String),
    #[error("protocol {0}: no session within the length bounds after {MAX_ATTEMPTS} walks")]
    LengthBounds(String),
    #[error("noise rate {0} outside [0, {MAX_NOISE_RATE}]")]
    NoiseRate(f64),
    #[error("too many {0} for the address plan")]
    Capacity(&'static str),
    #[error("duplicate protocol name {0}")]
    DuplicateName(String),
    #[error("writing {path}: {reason}")]
    Io { path: String, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledMessage {
    pub format: String,
    pub role: FormatRole,
    pub bytes: Vec<u8>,
}

fn walk<'a>(spec: &'a ProtocolSpec, rng: &mut ChaCha8Rng) -> Option<Vec<&'a FormatSpec>> {
    let (_, max_len) = spec.session_len;
    let mut state = spec.psm.start()?.id.as_str();
    let mut out = Vec::new();
    loop {
        let edges: Vec<_> = spec.psm.outgoing(state).collect();
        let last = edges.last()?;
        let r: f64 = rng.gen();
        let mut acc = 0.0;
        let mut chosen = *last;
        for t in &edges {
            acc += t.p;
            if r < acc {
                chosen = t;
                break;
            }
        }
        match &chosen.label {
            None => return Some(out),
            Some(l) => {
                if out.len() == max_len {
                    return None;
                }
                out.push(spec.format(l)?);
                state = chosen.to.as_str();
            }
        }
    }
}

fn render(f: &FormatSpec, rng: &mut ChaCha8Rng) -> Vec<u8> {
    let (lo, hi) = f.filler_len_range;
    let n = rng.gen_range(lo..=hi);
    let (a, b) = f.filler.alphabet();
    let mut bytes = f.magic_hex.clone();
    if f.length_field {
        bytes.extend_from_slice(&(n as u16).to_be_bytes());
    }
    bytes.extend((0..n).map(|_| rng.gen_range(a..=b)));
    bytes
}

/// Random walk over the spec's machine, rejecting walks outside the session
/// length bounds.
pub fn sample_session(spec: &ProtocolSpec, seed: u64) -> Result<Vec<SampledMessage>, SynthError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (min_len, _) = spec.session_len;
    for _ in 0..MAX_ATTEMPTS {
        let Some(formats) = walk(spec, &mut rng) else {
            continue;
        };
        if formats.len() < min_len {
            continue;
        }
        return Ok(formats
            .into_iter()
            .map(|f| SampledMessage {
                format: f.name.clone(),
                role: f.role,
                bytes: render(f, &mut rng),
            })
            .collect());
    }
    Err(SynthError::LengthBounds(spec.name.clone()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub packets: Vec<RawPacket>,
    pub truth: GroundTruth,
}

struct Draft {
    protocol: usize,
    client: SocketAddr,
    server: SocketAddr,
    messages: Vec<(String, bool, Vec<u8>)>,
}

fn endpoints(protocol: usize, i: usize, port: u16) -> Result<(SocketAddr, SocketAddr), SynthError> {
    if protocol > 254 {
        return Err(SynthError::Capacity("protocols"));
    }
    if i >= 250 * 256 || i > (u16::MAX - 20_000) as usize {
        return Err(SynthError::Capacity("sessions"));
    }
    let client = Ipv4Addr::new(10, protocol as u8, (i / 250) as u8, (i % 250 + 1) as u8);
    let server = Ipv4Addr::new(192, 168, 0, protocol as u8 + 1);
    Ok((
        SocketAddr::new(IpAddr::V4(client), 20_000 + i as u16),
        SocketAddr::new(IpAddr::V4(server), port),
    ))
}

fn round_us(t: f64) -> f64 {
    (t * 1e6).round() / 1e6
}

/// Samples `sessions_per_spec` sessions of every spec, injects random-byte
/// noise messages into random sessions, and interleaves everything by
/// timestamp.
pub fn generate_corpus(
    specs: &[ProtocolSpec],
    sessions_per_spec: usize,
    noise_rate: f64,
    seed: u64,
) -> Result<Corpus, SynthError> {
    if !(0.0..=MAX_NOISE_RATE).contains(&noise_rate) {
        return Err(SynthError::NoiseRate(noise_rate));
    }
    let mut names = BTreeSet::new();
    for s in specs {
        s.validate()?;
        if !names.insert(s.name.as_str()) {
            return Err(SynthError::DuplicateName(s.name.clone()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut drafts = Vec::new();
    for (p, spec) in specs.iter().enumerate() {
        let port = spec.port.unwrap_or(10_000 + p as u16);
        for i in 0..sessions_per_spec {
            let (client, server) = endpoints(p, i, port)?;
            let messages = sample_session(spec, rng.gen())?
                .into_iter()
                .map(|m| (m.format, m.role == FormatRole::Client, m.bytes))
                .collect();
            drafts.push(Draft {
                protocol: p,
                client,
                server,
                messages,
            });
        }
    }

    let clean: usize = drafts.iter().map(|d| d.messages.len()).sum();
    let noise = (noise_rate * clean as f64).round() as usize;
    if !drafts.is_empty() {
        for _ in 0..noise {
            let pick = rng.gen_range(0..drafts.len());
            let d = &mut drafts[pick];
            let at = rng.gen_range(1..=d.messages.len());
            let len = rng.gen_range(8..=64);
            let bytes: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
            d.messages
                .insert(at, (NOISE_LABEL.to_string(), rng.gen(), bytes));
        }
    }

    let mut stamped = Vec::new();
    let mut sessions = Vec::with_capacity(drafts.len());
    for (index, d) in drafts.iter().enumerate() {
        let mut t: f64 = rng.gen_range(0.0..60.0);
        for (j, (_, from_client, bytes)) in d.messages.iter().enumerate() {
            t += rng.gen_range(0.001..0.05);
            let (src, dst) = if *from_client {
                (d.client, d.server)
            } else {
                (d.server, d.client)
            };
            let packet = RawPacket {
                timestamp: round_us(t),
                five_tuple: FiveTuple {
                    src,
                    dst,
                    transport: Transport::Tcp,
                },
                payload: bytes.clone(),
            };
            stamped.push((index, j, packet));
        }
        sessions.push(TruthSession {
            index,
            key: FlowKey::new(d.client, d.server, Transport::Tcp),
            protocol: specs[d.protocol].name.clone(),
            formats: d.messages.iter().map(|(f, _, _)| f.clone()).collect(),
        });
    }
    stamped.sort_by(|a, b| {
        a.2.timestamp
            .total_cmp(&b.2.timestamp)
            .then(a.0.cmp(&b.0))
            .then(a.1.cmp(&b.1))
    });

    Ok(Corpus {
        packets: stamped.into_iter().map(|(_, _, p)| p).collect(),
        truth: GroundTruth {
            sessions,
            reference_psms: specs
                .iter()
                .map(|s| (s.name.clone(), s.psm.clone()))
                .collect(),
        },
    })
}

impl Corpus {
    pub fn trace_jsonl(&self) -> String {
        write_jsonl(&self.packets)
    }

    /// Writes `trace.jsonl` and `truth.json` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<(), SynthError> {
        let io = |path: &Path, e: std::io::Error| SynthError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        };
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        let trace = dir.join("trace.jsonl");
        std::fs::write(&trace, self.trace_jsonl()).map_err(|e| io(&trace, e))?;
        let truth = dir.join("truth.json");
        std::fs::write(&truth, self.truth.to_json()).map_err(|e| io(&truth, e))?;
        Ok(())
    }
}
