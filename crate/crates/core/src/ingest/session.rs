use std::collections::HashMap;

use super::{Direction, FlowKey, Message, RawPacket, Session};

/// Groups packets into bidirectional sessions.
///
/// Sessions are ordered by their first packet (timestamp, then capture
/// order); messages inside a session likewise. The endpoint that sent the
/// session's first packet is the initiator. Empty payloads are skipped.
pub fn slice_sessions(packets: &[RawPacket]) -> Vec<Session> {
    let mut order: Vec<usize> = (0..packets.len())
        .filter(|&i| !packets[i].payload.is_empty())
        .collect();
    order.sort_by(|&a, &b| {
        packets[a]
            .timestamp
            .total_cmp(&packets[b].timestamp)
            .then(a.cmp(&b))
    });

    let mut index_of: HashMap<FlowKey, usize> = HashMap::new();
    let mut sessions: Vec<Session> = Vec::new();
    let mut initiators = Vec::new();
    for i in order {
        let p = &packets[i];
        let key = FlowKey::of(&p.five_tuple);
        let slot = *index_of.entry(key).or_insert_with(|| {
            sessions.push(Session {
                key,
                messages: Vec::new(),
            });
            initiators.push(p.five_tuple.src);
            sessions.len() - 1
        });
        let session = &mut sessions[slot];
        let direction = if p.five_tuple.src == initiators[slot] {
            Direction::Initiator
        } else {
            Direction::Responder
        };
        let index_in_session = session.messages.len();
        session.messages.push(Message {
            session_key: key,
            direction,
            index_in_session,
            bytes: p.payload.clone(),
            timestamp: p.timestamp,
        });
    }
    sessions
}
