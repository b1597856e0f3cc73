use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::pfts::{Node, Pfts};
use super::PsmError;
use crate::ingest::Direction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Start,
    End,
    Client,
    Server,
}

impl From<Direction> for Role {
    fn from(d: Direction) -> Self {
        match d {
            Direction::Initiator => Role::Client,
            Direction::Responder => Role::Server,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Start => "start",
            Role::End => "end",
            Role::Client => "client",
            Role::Server => "server",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct State {
    pub id: String,
    pub role: Role,
}

/// Edge labeled with the format emitted when taking it; edges into the end
/// state carry no label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub from: String,
    pub to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Psm {
    pub states: Vec<State>,
    pub transitions: Vec<Transition>,
}

pub const START_ID: &str = "start";
pub const END_ID: &str = "end";

impl Psm {
    pub fn from_json(json: &str) -> Result<Psm, PsmError> {
        let psm: Psm = serde_json::from_str(json).map_err(|e| PsmError::Invalid(e.to_string()))?;
        psm.validate()?;
        Ok(psm)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("psm serializes")
    }

    pub fn state(&self, id: &str) -> Option<&State> {
        self.states.iter().find(|s| s.id == id)
    }

    pub fn start(&self) -> Option<&State> {
        self.states.iter().find(|s| s.role == Role::Start)
    }

    pub fn end(&self) -> Option<&State> {
        self.states.iter().find(|s| s.role == Role::End)
    }

    pub fn outgoing<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a Transition> + 'a {
        self.transitions.iter().filter(move |t| t.from == id)
    }

    /// Structural checks: unique ids, exactly one start and one end, known
    /// endpoints, no edge into start or out of end, probabilities in (0, 1].
    pub fn validate(&self) -> Result<(), PsmError> {
        let bad = |m: String| Err(PsmError::Invalid(m));
        let mut ids = BTreeSet::new();
        for s in &self.states {
            if !ids.insert(s.id.as_str()) {
                return bad(format!("duplicate state id {:?}", s.id));
            }
        }
        for role in [Role::Start, Role::End] {
            let n = self.states.iter().filter(|s| s.role == role).count();
            if n != 1 {
                return bad(format!("expected one {role} state, found {n}"));
            }
        }
        let role_of: BTreeMap<&str, Role> = self
            .states
            .iter()
            .map(|s| (s.id.as_str(), s.role))
            .collect();
        for t in &self.transitions {
            let (Some(&rf), Some(&rt)) = (role_of.get(t.from.as_str()), role_of.get(t.to.as_str()))
            else {
                return bad(format!(
                    "transition {} -> {} references unknown state",
                    t.from, t.to
                ));
            };
            if rt == Role::Start || rf == Role::End {
                return bad(format!(
                    "transition {} -> {} crosses a boundary backwards",
                    t.from, t.to
                ));
            }
            if !(t.p > 0.0 && t.p <= 1.0) {
                return bad(format!(
                    "transition {} -> {} has probability {}",
                    t.from, t.to, t.p
                ));
            }
        }
        Ok(())
    }

    /// Applies `f` to every transition label.
    pub fn map_labels(&self, f: impl Fn(&str) -> String) -> Psm {
        Psm {
            states: self.states.clone(),
            transitions: self
                .transitions
                .iter()
                .map(|t| Transition {
                    label: t.label.as_deref().map(&f),
                    ..t.clone()
                })
                .collect(),
        }
    }
}

pub fn state_id(role: Role, label: usize) -> String {
    format!("{role}:{label}")
}

/// Majority direction per format label over aligned (token, direction)
/// pairs; ties go to the initiator.
pub fn majority_directions<I>(pairs: I) -> BTreeMap<usize, Direction>
where
    I: IntoIterator<Item = (Option<usize>, Direction)>,
{
    let mut votes: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for (token, dir) in pairs {
        if let Some(l) = token {
            let v = votes.entry(l).or_default();
            match dir {
                Direction::Initiator => v.0 += 1,
                Direction::Responder => v.1 += 1,
            }
        }
    }
    votes
        .into_iter()
        .map(|(l, (i, r))| {
            let d = if r > i {
                Direction::Responder
            } else {
                Direction::Initiator
            };
            (l, d)
        })
        .collect()
}

/// One state per format label that appears in `pfts`. Transition
/// probabilities are state probabilities over the given counts.
pub fn pfts_to_psm(pfts: &Pfts, directions: &BTreeMap<usize, Direction>) -> Result<Psm, PsmError> {
    let labels = pfts.labels();
    let mut ids: BTreeMap<Node, String> = BTreeMap::new();
    ids.insert(Node::Start, START_ID.to_string());
    ids.insert(Node::End, END_ID.to_string());
    let mut states = vec![
        State {
            id: START_ID.into(),
            role: Role::Start,
        },
        State {
            id: END_ID.into(),
            role: Role::End,
        },
    ];
    for &l in &labels {
        let dir = directions.get(&l).ok_or(PsmError::NoDirection(l))?;
        let id = state_id(Role::from(*dir), l);
        ids.insert(Node::Format(l), id.clone());
        states.push(State {
            id,
            role: Role::from(*dir),
        });
    }
    let totals = pfts.totals();
    let transitions = pfts
        .edges()
        .map(|((from, to), c)| Transition {
            from: ids[&from].clone(),
            to: ids[&to].clone(),
            label: match to {
                Node::Format(l) => Some(l.to_string()),
                _ => None,
            },
            p: c as f64 / totals[&from] as f64,
        })
        .collect();
    Ok(Psm {
        states,
        transitions,
    })
}
