//! Classic libpcap reader with an Ethernet/IPv4/TCP+UDP decode path.
//!
//! Frames that do not decode to IPv4 TCP or UDP (ARP, IPv6, VLAN-tagged,
//! fragments) are skipped rather than rejected.

use std::net::{Ipv4Addr, SocketAddr, SocketAddrV4};

use super::{FiveTuple, IngestError, RawPacket, Transport};

const MAGIC_USEC: u32 = 0xa1b2_c3d4;
const MAGIC_NSEC: u32 = 0xa1b2_3c4d;
const LINKTYPE_ETHERNET: u32 = 1;
const GLOBAL_HEADER_LEN: usize = 24;
const RECORD_HEADER_LEN: usize = 16;

#[derive(Clone, Copy)]
struct Layout {
    big_endian: bool,
    nanos: bool,
}

impl Layout {
    fn u32_at(&self, b: &[u8], off: usize) -> u32 {
        let raw = [b[off], b[off + 1], b[off + 2], b[off + 3]];
        if self.big_endian {
            u32::from_be_bytes(raw)
        } else {
            u32::from_le_bytes(raw)
        }
    }
}

pub fn parse_pcap(data: &[u8]) -> Result<Vec<RawPacket>, IngestError> {
    if data.is_empty() {
        return Ok(Vec::new());
    }
    if data.len() < GLOBAL_HEADER_LEN {
        return Err(IngestError::PcapHeader(format!(
            "file is {} bytes, shorter than the global header",
            data.len()
        )));
    }
    let magic_le = u32::from_le_bytes([data[0], data[1], data[2], data[3]]);
    let magic_be = u32::from_be_bytes([data[0], data[1], data[2], data[3]]);
    let layout = match (magic_le, magic_be) {
        (MAGIC_USEC, _) => Layout {
            big_endian: false,
            nanos: false,
        },
        (MAGIC_NSEC, _) => Layout {
            big_endian: false,
            nanos: true,
        },
        (_, MAGIC_USEC) => Layout {
            big_endian: true,
            nanos: false,
        },
        (_, MAGIC_NSEC) => Layout {
            big_endian: true,
            nanos: true,
        },
        _ => {
            return Err(IngestError::PcapHeader(format!(
                "bad magic {magic_le:#010x}"
            )))
        }
    };
    let link = layout.u32_at(data, 20);
    if link != LINKTYPE_ETHERNET {
        return Err(IngestError::LinkType(link));
    }

    let mut out = Vec::new();
    let mut off = GLOBAL_HEADER_LEN;
    let mut index = 0;
    while off < data.len() {
        if data.len() - off < RECORD_HEADER_LEN {
            return Err(IngestError::Malformed {
                index,
                reason: "truncated record header".into(),
            });
        }
        let ts_sec = layout.u32_at(data, off);
        let ts_frac = layout.u32_at(data, off + 4);
        let incl = layout.u32_at(data, off + 8) as usize;
        let body = off + RECORD_HEADER_LEN;
        if data.len() - body < incl {
            return Err(IngestError::Malformed {
                index,
                reason: format!("record claims {incl} bytes, {} remain", data.len() - body),
            });
        }
        let frac_scale = if layout.nanos { 1e-9 } else { 1e-6 };
        let timestamp = ts_sec as f64 + ts_frac as f64 * frac_scale;
        if let Some((five_tuple, payload)) = decode_ethernet(&data[body..body + incl]) {
            out.push(RawPacket {
                timestamp,
                five_tuple,
                payload: payload.to_vec(),
            });
        }
        off = body + incl;
        index += 1;
    }
    Ok(out)
}

fn decode_ethernet(frame: &[u8]) -> Option<(FiveTuple, &[u8])> {
    if frame.len() < 14 || u16::from_be_bytes([frame[12], frame[13]]) != 0x0800 {
        return None;
    }
    decode_ipv4(&frame[14..])
}

fn decode_ipv4(pkt: &[u8]) -> Option<(FiveTuple, &[u8])> {
    if pkt.len() < 20 || pkt[0] >> 4 != 4 {
        return None;
    }
    let ihl = usize::from(pkt[0] & 0x0f) * 4;
    let total = usize::from(u16::from_be_bytes([pkt[2], pkt[3]]));
    if ihl < 20 || total < ihl || pkt.len() < total {
        return None;
    }
    let flags_frag = u16::from_be_bytes([pkt[6], pkt[7]]);
    if flags_frag & 0x3fff != 0 {
        // more-fragments set or nonzero offset
        return None;
    }
    let src = Ipv4Addr::new(pkt[12], pkt[13], pkt[14], pkt[15]);
    let dst = Ipv4Addr::new(pkt[16], pkt[17], pkt[18], pkt[19]);
    let seg = &pkt[ihl..total];
    let (transport, header_len) = match pkt[9] {
        6 => {
            if seg.len() < 20 {
                return None;
            }
            let off = usize::from(seg[12] >> 4) * 4;
            (Transport::Tcp, off)
        }
        17 => (Transport::Udp, 8),
        _ => return None,
    };
    if seg.len() < header_len || header_len < 8 {
        return None;
    }
    let sport = u16::from_be_bytes([seg[0], seg[1]]);
    let dport = u16::from_be_bytes([seg[2], seg[3]]);
    let five_tuple = FiveTuple {
        src: SocketAddr::V4(SocketAddrV4::new(src, sport)),
        dst: SocketAddr::V4(SocketAddrV4::new(dst, dport)),
        transport,
    };
    Some((five_tuple, &seg[header_len..]))
}
