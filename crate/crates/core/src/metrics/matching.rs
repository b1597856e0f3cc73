use std::collections::{BTreeMap, BTreeSet};

use pathfinding::kuhn_munkres::kuhn_munkres;
use pathfinding::matrix::Matrix;

use crate::psm::{Psm, Role};

fn substantive(role: Role) -> bool {
    matches!(role, Role::Client | Role::Server)
}

fn incident_labels(psm: &Psm, id: &str) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for t in &psm.transitions {
        if t.from == id || t.to == id {
            if let Some(l) = &t.label {
                *m.entry(l.clone()).or_insert(0) += 1;
            }
        }
    }
    m
}

fn dice(a: &BTreeMap<String, usize>, b: &BTreeMap<String, usize>) -> f64 {
    let size_a: usize = a.values().sum();
    let size_b: usize = b.values().sum();
    if size_a + size_b == 0 {
        return 0.0;
    }
    let common: usize = a
        .iter()
        .map(|(l, &c)| c.min(b.get(l).copied().unwrap_or(0)))
        .sum();
    2.0 * common as f64 / (size_a + size_b) as f64
}

/// One-to-one matching of inferred to reference states.
///
/// Client/server states pair only with the same role and a positive Dice
/// overlap of incident transition labels. The matching maximizes the number
/// of pairs, then the summed overlap, then prefers inferred states listed
/// earlier. Start and end states pair with each other unconditionally.
pub fn match_states(inferred: &Psm, reference: &Psm) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for role in [Role::Start, Role::End] {
        if let (Some(a), Some(b)) = (
            inferred.states.iter().find(|s| s.role == role),
            reference.states.iter().find(|s| s.role == role),
        ) {
            out.insert(a.id.clone(), b.id.clone());
        }
    }

    let inf: Vec<_> = inferred
        .states
        .iter()
        .filter(|s| substantive(s.role))
        .collect();
    let refs: Vec<_> = reference
        .states
        .iter()
        .filter(|s| substantive(s.role))
        .collect();
    if inf.is_empty() || refs.is_empty() {
        return out;
    }
    let inf_labels: Vec<_> = inf
        .iter()
        .map(|s| incident_labels(inferred, &s.id))
        .collect();
    let ref_labels: Vec<_> = refs
        .iter()
        .map(|s| incident_labels(reference, &s.id))
        .collect();

    let n = inf.len().max(refs.len());
    let tie = (inf.len() as i64 + 1).pow(2);
    let scale = 1_000_000i64;
    let big = (n as i64 + 1) * (scale + 1) * tie;
    let mut admissible = vec![vec![false; n]; n];
    let mut w = Matrix::new(n, n, 0i64);
    for (i, s) in inf.iter().enumerate() {
        for (j, r) in refs.iter().enumerate() {
            if s.role != r.role {
                continue;
            }
            let d = dice(&inf_labels[i], &ref_labels[j]);
            if d > 0.0 {
                admissible[i][j] = true;
                w[(i, j)] = big + (d * scale as f64).round() as i64 * tie + (inf.len() - i) as i64;
            }
        }
    }
    let (_, assignment) = kuhn_munkres(&w);
    for (i, &j) in assignment.iter().enumerate() {
        if i < inf.len() && j < refs.len() && admissible[i][j] {
            out.insert(inf[i].id.clone(), refs[j].id.clone());
        }
    }
    out
}

/// Orders the two machines canonically so scores are exactly symmetric.
fn canonical<'a>(a: &'a Psm, b: &'a Psm) -> (&'a Psm, &'a Psm) {
    let ka = serde_json::to_string(a).expect("psm serializes");
    let kb = serde_json::to_string(b).expect("psm serializes");
    if ka <= kb {
        (a, b)
    } else {
        (b, a)
    }
}

fn coefficient(matched: usize, na: usize, nb: usize) -> f64 {
    if na + nb == 0 {
        1.0
    } else {
        2.0 * matched as f64 / (na + nb) as f64
    }
}

/// State Matching Coefficient over client/server states.
pub fn smc(inferred: &Psm, reference: &Psm) -> f64 {
    let (a, b) = canonical(inferred, reference);
    let m = match_states(a, b);
    let roles: BTreeMap<&str, Role> = a.states.iter().map(|s| (s.id.as_str(), s.role)).collect();
    let matched = m
        .keys()
        .filter(|id| substantive(roles[id.as_str()]))
        .count();
    let count = |p: &Psm| p.states.iter().filter(|s| substantive(s.role)).count();
    coefficient(matched, count(a), count(b))
}

/// Transition Matching Coefficient over edges between client/server
/// states; an edge matches when both endpoints map across and the labels are
/// equal. Probabilities are ignored.
pub fn tmc(inferred: &Psm, reference: &Psm) -> f64 {
    let (a, b) = canonical(inferred, reference);
    let m = match_states(a, b);
    let edges = |p: &Psm| -> BTreeSet<(String, String, Option<String>)> {
        let roles: BTreeMap<&str, Role> =
            p.states.iter().map(|s| (s.id.as_str(), s.role)).collect();
        p.transitions
            .iter()
            .filter(|t| {
                roles.get(t.from.as_str()).is_some_and(|&r| substantive(r))
                    && roles.get(t.to.as_str()).is_some_and(|&r| substantive(r))
            })
            .map(|t| (t.from.clone(), t.to.clone(), t.label.clone()))
            .collect()
    };
    let ea = edges(a);
    let eb = edges(b);
    let matched = ea
        .iter()
        .filter(|(f, t, l)| match (m.get(f), m.get(t)) {
            (Some(f2), Some(t2)) => eb.contains(&(f2.clone(), t2.clone(), l.clone())),
            _ => false,
        })
        .count();
    coefficient(matched, ea.len(), eb.len())
}
