use protoinfer::psm::{filter_noise, ps, pt, Node, Pfts, PsmThresholds};

pub fn run() -> Result<String, String> {
    let (a, b) = (Node::Format(0), Node::Format(1));
    let (x, y) = (Node::Format(7), Node::Format(8));
    let pfts = Pfts::from_counts([
        ((Node::Start, a), 333),
        ((a, b), 333),
        ((b, Node::End), 333),
        ((x, y), 1),
    ]);
    if pfts.n_set() != 1000 {
        return Err(format!("set has {} transitions", pfts.n_set()));
    }
    let (p_s, p_t) = (ps(&pfts, x, y).unwrap(), pt(&pfts, x, y).unwrap());
    if p_s != 1.0 || p_t >= 0.05 {
        return Err(format!("setup: ps {p_s}, pt {p_t}"));
    }
    let state_only = filter_noise(
        &pfts,
        &PsmThresholds {
            t_ps: 0.05,
            t_pt: 0.0,
        },
    );
    if state_only.count(x, y) != 1 {
        return Err("state probability alone removed the edge".into());
    }
    let both = filter_noise(
        &pfts,
        &PsmThresholds {
            t_ps: 0.05,
            t_pt: 0.05,
        },
    );
    if both.count(x, y) != 0 || both.outgoing(x) != 0 {
        return Err("total probability kept the edge".into());
    }
    if both.n_set() != 999 {
        return Err(format!(
            "filter removed more than the noise edge: {}",
            both.n_set()
        ));
    }
    Ok(format!(
        "edge with ps {p_s} and pt {p_t} kept by (0.05, 0) and removed by (0.05, 0.05)"
    ))
}
