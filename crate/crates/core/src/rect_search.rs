//! Parallel diamond sweep with guides and explorers.
//!
//! A search team is one explorer and four guides, one per cardinal
//! direction. Guides mark the corners of the level currently being swept;
//! the explorer zigzags around the level's diamond and turns whenever it
//! meets a guide. Every rule below depends only on the agent's own state and
//! the set of search states sensed in its cell.

use serde::{Deserialize, Serialize};

use crate::engine::{LocalInput, Move};
use crate::protocol::AgentState;

/// Outward direction of a guide.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dir {
    N,
    E,
    S,
    W,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::N, Dir::E, Dir::S, Dir::W];

    pub fn outward(self) -> Move {
        match self {
            Dir::N => Move::N,
            Dir::E => Move::E,
            Dir::S => Move::S,
            Dir::W => Move::W,
        }
    }
}

/// Side of the diamond an explorer is currently walking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Leg {
    SW,
    SE,
    NE,
    NW,
}

impl Leg {
    /// The two alternating moves of the leg, in the order they are taken.
    pub fn moves(self) -> (Move, Move) {
        match self {
            Leg::SW => (Move::W, Move::S),
            Leg::SE => (Move::S, Move::E),
            Leg::NE => (Move::E, Move::N),
            Leg::NW => (Move::N, Move::W),
        }
    }

    /// Leg entered at the next corner; `None` after the last one.
    pub fn next(self) -> Option<Leg> {
        match self {
            Leg::SW => Some(Leg::SE),
            Leg::SE => Some(Leg::NE),
            Leg::NE => Some(Leg::NW),
            Leg::NW => None,
        }
    }
}

/// Which of the leg's two moves comes next.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Stride {
    First,
    Second,
}

impl Stride {
    fn flip(self) -> Self {
        match self {
            Stride::First => Stride::Second,
            Stride::Second => Stride::First,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RectAgentState {
    FreshGuide { dir: Dir, seen_guide: bool, first: bool },
    Guide { dir: Dir },
    MovingGuide { dir: Dir },
    FreshExplorer { seen_guide: bool, first: bool },
    Explorer { leg: Leg, next: Stride },
    MovingExplorer,
}

/// Variant tag of a [`RectAgentState`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RectKind {
    FreshGuide,
    Guide,
    MovingGuide,
    FreshExplorer,
    Explorer,
    MovingExplorer,
}

impl RectAgentState {
    pub fn kind(&self) -> RectKind {
        match self {
            RectAgentState::FreshGuide { .. } => RectKind::FreshGuide,
            RectAgentState::Guide { .. } => RectKind::Guide,
            RectAgentState::MovingGuide { .. } => RectKind::MovingGuide,
            RectAgentState::FreshExplorer { .. } => RectKind::FreshExplorer,
            RectAgentState::Explorer { .. } => RectKind::Explorer,
            RectAgentState::MovingExplorer => RectKind::MovingExplorer,
        }
    }

    /// Explorer, fresh explorer or moving explorer.
    pub fn is_exploring(&self) -> bool {
        matches!(
            self.kind(),
            RectKind::Explorer | RectKind::FreshExplorer | RectKind::MovingExplorer
        )
    }

    pub fn guide_dir(&self) -> Option<Dir> {
        match *self {
            RectAgentState::FreshGuide { dir, .. }
            | RectAgentState::Guide { dir }
            | RectAgentState::MovingGuide { dir } => Some(dir),
            _ => None,
        }
    }
}

/// States of a freshly emitted team: the explorer, then guides N, E, S, W.
pub fn team_states(first: bool) -> [RectAgentState; 5] {
    let guide = |dir| RectAgentState::FreshGuide {
        dir,
        seen_guide: false,
        first,
    };
    [
        RectAgentState::FreshExplorer {
            seen_guide: false,
            first,
        },
        guide(Dir::N),
        guide(Dir::E),
        guide(Dir::S),
        guide(Dir::W),
    ]
}

fn senses(input: &LocalInput<'_, AgentState>, kind: RectKind) -> bool {
    input.senses_any(|s| matches!(s, AgentState::Rect(r) if r.kind() == kind))
}

enum Walk {
    Continue { seen_guide: bool },
    Stop,
}

/// Outward walk shared by fresh guides and fresh explorers: find the guide
/// block, pass it, stop on the first cell holding neither a guide nor a
/// moving guide. The first team stops one cell out.
fn fresh_walk(seen_guide: bool, first: bool, input: &LocalInput<'_, AgentState>) -> Walk {
    if input.at_origin() {
        Walk::Continue { seen_guide }
    } else if first {
        Walk::Stop
    } else if senses(input, RectKind::Guide) || senses(input, RectKind::MovingGuide) {
        Walk::Continue { seen_guide: true }
    } else if seen_guide {
        Walk::Stop
    } else {
        Walk::Continue { seen_guide: false }
    }
}

fn fresh_guide_step(
    dir: Dir,
    seen_guide: bool,
    first: bool,
    input: &LocalInput<'_, AgentState>,
) -> (RectAgentState, Move) {
    match fresh_walk(seen_guide, first, input) {
        Walk::Continue { seen_guide } => (
            RectAgentState::FreshGuide {
                dir,
                seen_guide,
                first,
            },
            dir.outward(),
        ),
        Walk::Stop => (RectAgentState::Guide { dir }, Move::P),
    }
}

fn guide_step(dir: Dir, input: &LocalInput<'_, AgentState>) -> (RectAgentState, Move) {
    if senses(input, RectKind::Explorer) {
        (RectAgentState::MovingGuide { dir }, dir.outward())
    } else {
        (RectAgentState::Guide { dir }, Move::P)
    }
}

fn moving_guide_step(dir: Dir, input: &LocalInput<'_, AgentState>) -> (RectAgentState, Move) {
    if senses(input, RectKind::Guide) {
        (RectAgentState::MovingGuide { dir }, dir.outward())
    } else {
        (RectAgentState::Guide { dir }, Move::P)
    }
}

/// First move of a sweep: west from the north corner.
fn start_sweep() -> (RectAgentState, Move) {
    (
        RectAgentState::Explorer {
            leg: Leg::SW,
            next: Stride::Second,
        },
        Move::W,
    )
}

fn fresh_explorer_step(
    seen_guide: bool,
    first: bool,
    input: &LocalInput<'_, AgentState>,
) -> (RectAgentState, Move) {
    match fresh_walk(seen_guide, first, input) {
        Walk::Continue { seen_guide } => {
            (RectAgentState::FreshExplorer { seen_guide, first }, Move::N)
        }
        Walk::Stop => start_sweep(),
    }
}

fn explorer_step(leg: Leg, next: Stride, input: &LocalInput<'_, AgentState>) -> (RectAgentState, Move) {
    if senses(input, RectKind::Guide) {
        // Zigzag paths touch the axes only at corners.
        match leg.next() {
            None => (RectAgentState::MovingExplorer, Move::N),
            Some(leg) => (
                RectAgentState::Explorer {
                    leg,
                    next: Stride::Second,
                },
                leg.moves().0,
            ),
        }
    } else {
        let (a, b) = leg.moves();
        let mv = match next {
            Stride::First => a,
            Stride::Second => b,
        };
        (
            RectAgentState::Explorer {
                leg,
                next: next.flip(),
            },
            mv,
        )
    }
}

fn moving_explorer_step(input: &LocalInput<'_, AgentState>) -> (RectAgentState, Move) {
    if senses(input, RectKind::Guide) {
        (RectAgentState::MovingExplorer, Move::N)
    } else {
        start_sweep()
    }
}

/// Transition of a search-team member. Deterministic given the input.
pub fn rect_transition(
    state: RectAgentState,
    input: &LocalInput<'_, AgentState>,
) -> (RectAgentState, Move) {
    match state {
        RectAgentState::FreshGuide {
            dir,
            seen_guide,
            first,
        } => fresh_guide_step(dir, seen_guide, first, input),
        RectAgentState::Guide { dir } => guide_step(dir, input),
        RectAgentState::MovingGuide { dir } => moving_guide_step(dir, input),
        RectAgentState::FreshExplorer { seen_guide, first } => {
            fresh_explorer_step(seen_guide, first, input)
        }
        RectAgentState::Explorer { leg, next } => explorer_step(leg, next, input),
        RectAgentState::MovingExplorer => moving_explorer_step(input),
    }
}
