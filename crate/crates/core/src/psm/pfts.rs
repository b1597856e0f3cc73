use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::PsmError;
use crate::session_cluster::SessionSequence;

/// PFTS endpoint: a format cluster or one of the virtual session
/// boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Start,
    End,
    Format(usize),
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Start => f.write_str("START"),
            Node::End => f.write_str("END"),
            Node::Format(l) => write!(f, "{l}"),
        }
    }
}

/// Counted format-to-format transitions of one protocol.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Pfts {
    counts: BTreeMap<(Node, Node), u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsmThresholds {
    pub t_ps: f64,
    pub t_pt: f64,
}

impl Default for PsmThresholds {
    fn default() -> Self {
        PsmThresholds {
            t_ps: 0.05,
            t_pt: 0.05,
        }
    }
}

impl PsmThresholds {
    pub fn validate(&self) -> Result<(), PsmError> {
        let ok = |t: f64| (0.0..1.0).contains(&t);
        if ok(self.t_ps) && ok(self.t_pt) {
            Ok(())
        } else {
            Err(PsmError::Thresholds(self.t_ps, self.t_pt))
        }
    }
}

impl Pfts {
    pub fn from_counts<I: IntoIterator<Item = ((Node, Node), u64)>>(counts: I) -> Self {
        let mut out = Pfts::default();
        for (edge, c) in counts {
            if c > 0 {
                *out.counts.entry(edge).or_insert(0) += c;
            }
        }
        out
    }

    pub fn count(&self, from: Node, to: Node) -> u64 {
        self.counts.get(&(from, to)).copied().unwrap_or(0)
    }

    /// Outgoing transition count of `from`.
    pub fn outgoing(&self, from: Node) -> u64 {
        self.counts
            .range((from, Node::Start)..)
            .take_while(|((f, _), _)| *f == from)
            .map(|(_, c)| c)
            .sum()
    }

    pub fn totals(&self) -> BTreeMap<Node, u64> {
        let mut t = BTreeMap::new();
        for ((f, _), c) in &self.counts {
            *t.entry(*f).or_insert(0) += c;
        }
        t
    }

    pub fn n_set(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = ((Node, Node), u64)> + '_ {
        self.counts.iter().map(|(e, c)| (*e, *c))
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn labels(&self) -> BTreeSet<usize> {
        self.counts
            .keys()
            .flat_map(|(a, b)| [*a, *b])
            .filter_map(|n| match n {
                Node::Format(l) => Some(l),
                _ => None,
            })
            .collect()
    }
}

/// Counts START→t₁, tᵢ→tᵢ₊₁ and tₙ→END over every session. Noise tokens are
/// bridged; sessions with no format token contribute nothing.
pub fn build_pfts<'a, I>(seqs: I) -> Pfts
where
    I: IntoIterator<Item = &'a SessionSequence>,
{
    let mut counts: BTreeMap<(Node, Node), u64> = BTreeMap::new();
    for s in seqs {
        let formats: Vec<Node> = s
            .tokens
            .iter()
            .flatten()
            .map(|&l| Node::Format(l))
            .collect();
        if formats.is_empty() {
            continue;
        }
        let chain = std::iter::once(Node::Start)
            .chain(formats)
            .chain(std::iter::once(Node::End))
            .collect::<Vec<_>>();
        for w in chain.windows(2) {
            *counts.entry((w[0], w[1])).or_insert(0) += 1;
        }
    }
    Pfts { counts }
}

/// State probability: share of `from`'s outgoing transitions going to `to`.
pub fn ps(pfts: &Pfts, from: Node, to: Node) -> Result<f64, PsmError> {
    let out = pfts.outgoing(from);
    if out == 0 {
        return Err(PsmError::UnseenState(from.to_string()));
    }
    Ok(pfts.count(from, to) as f64 / out as f64)
}

/// Total probability: share of all transitions in the set.
pub fn pt(pfts: &Pfts, from: Node, to: Node) -> Result<f64, PsmError> {
    let n = pfts.n_set();
    if n == 0 {
        return Err(PsmError::EmptyPfts);
    }
    Ok(pfts.count(from, to) as f64 / n as f64)
}

/// Edges failing either threshold, judged on `pfts`' own counts.
pub fn noise_edges(pfts: &Pfts, th: &PsmThresholds) -> BTreeSet<(Node, Node)> {
    let n_set = pfts.n_set() as f64;
    let totals = pfts.totals();
    pfts.counts
        .iter()
        .filter(|((from, _), &c)| {
            let ps = c as f64 / totals[from] as f64;
            let pt = c as f64 / n_set;
            ps < th.t_ps || pt < th.t_pt
        })
        .map(|(e, _)| *e)
        .collect()
}

/// Single-pass removal of noise transitions, probabilities taken on the
/// original counts.
///
/// Boundary edges are kept when removing them would leave START without any
/// outgoing edge or END without any incoming edge.
pub fn filter_noise(pfts: &Pfts, th: &PsmThresholds) -> Pfts {
    let noise = noise_edges(pfts, th);
    let mut kept: BTreeMap<(Node, Node), u64> = pfts
        .counts
        .iter()
        .filter(|(e, _)| !noise.contains(e))
        .map(|(e, c)| (*e, *c))
        .collect();

    let has = |kept: &BTreeMap<(Node, Node), u64>, pred: &dyn Fn(&(Node, Node)) -> bool| {
        kept.keys().any(pred)
    };
    if !has(&kept, &|(f, _)| *f == Node::Start) {
        restore_strongest(pfts, &mut kept, |(f, _)| *f == Node::Start);
    }
    if !has(&kept, &|(_, t)| *t == Node::End) {
        restore_strongest(pfts, &mut kept, |(_, t)| *t == Node::End);
    }
    Pfts { counts: kept }
}

fn restore_strongest(
    original: &Pfts,
    kept: &mut BTreeMap<(Node, Node), u64>,
    pred: impl Fn(&(Node, Node)) -> bool,
) {
    let max = original
        .counts
        .iter()
        .filter(|(e, _)| pred(e))
        .map(|(_, c)| *c)
        .max();
    if let Some(max) = max {
        for (e, c) in original
            .counts
            .iter()
            .filter(|(e, c)| pred(e) && **c == max)
        {
            kept.insert(*e, *c);
        }
    }
}
