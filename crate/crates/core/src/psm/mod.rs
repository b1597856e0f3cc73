//! Protocol state machine inference from clustered sessions.

mod dot;
mod machine;
mod pfts;

pub use dot::to_dot;
pub use machine::{
    majority_directions, pfts_to_psm, state_id, Psm, Role, State, Transition, END_ID, START_ID,
};
pub use pfts::{build_pfts, filter_noise, noise_edges, ps, pt, Node, Pfts, PsmThresholds};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PsmError {
    #[error("state {0} has no outgoing transitions")]
    UnseenState(String),
    #[error("transition set is empty")]
    EmptyPfts,
    #[error("thresholds must lie in [0, 1), got t_ps={0} t_pt={1}")]
    Thresholds(f64, f64),
    #[error("no direction recorded for format {0}")]
    NoDirection(usize),
    #[error("invalid psm: {0}")]
    Invalid(String),
}
