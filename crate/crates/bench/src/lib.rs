//! Benchmark fixtures shared by the criterion targets.

use protoinfer::ingest::{flatten_messages, slice_sessions};
use protoinfer::synth::{generate_corpus, ProtocolSpec};

/// Payloads of the bundled two-protocol corpus.
pub fn corpus_payloads(sessions_per_spec: usize, seed: u64) -> Vec<Vec<u8>> {
    let specs = [
        ProtocolSpec::builtin("tlsish").expect("bundled"),
        ProtocolSpec::builtin("smtpish").expect("bundled"),
    ];
    let corpus =
        generate_corpus(&specs, sessions_per_spec, 0.02, seed).expect("bundled specs generate");
    let sessions = slice_sessions(&corpus.packets);
    flatten_messages(&sessions)
        .into_iter()
        .map(|m| m.bytes.clone())
        .collect()
}
