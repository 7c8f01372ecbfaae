//! Fair-coin composition of the rectangle search (with elected emission)
//! and the geometric walk.

use smallvec::smallvec;

use crate::emission::ElectorState;
use crate::engine::{Enabled, Move};
use crate::geom_search::GeomState;
use crate::protocol::AgentState;

/// The initial coin: join the elected rectangle search or walk geometrically.
pub fn coin_enabled() -> Enabled<AgentState> {
    smallvec![
        (AgentState::Elect(ElectorState::initial()), Move::P),
        (AgentState::Geom(GeomState::Init), Move::P),
    ]
}

/// Which side of the coin an agent landed on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Rect,
    Geom,
}

/// Branch of a state; `None` before the coin is tossed.
pub fn branch_of(state: &AgentState) -> Option<Branch> {
    match state {
        AgentState::Coin | AgentState::Idle => None,
        AgentState::Geom(_) => Some(Branch::Geom),
        AgentState::Rect(_) | AgentState::Elect(_) => Some(Branch::Rect),
    }
}
