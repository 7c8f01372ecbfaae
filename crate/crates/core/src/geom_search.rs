//! L-shaped geometric walks.
//!
//! Each agent picks one of the four quarter-planes, takes one mandatory step,
//! then walks a geometrically distributed number of longitudinal steps
//! followed by a geometrically distributed number of lateral steps, and
//! halts. The walk never pauses before halting, so the cell at distance `d`
//! is always reached at round `d` after the walk begins.
//!
//! The choice between "keep going straight" and "turn" is drawn one step
//! ahead (the `more` bit of [`GeomState::Leg1`]), which lets the turn itself
//! be a lateral step and lets a walk end right after its longitudinal leg.

use serde::{Deserialize, Serialize};
use smallvec::smallvec;

use crate::engine::{AgentId, Enabled, Move};
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Quadrant {
    NE,
    NW,
    SW,
    SE,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [Quadrant::NE, Quadrant::NW, Quadrant::SW, Quadrant::SE];

    /// `(longitudinal, lateral)` moves. NE walks east then north; the others
    /// are its rotations.
    pub fn moves(self) -> (Move, Move) {
        match self {
            Quadrant::NE => (Move::E, Move::N),
            Quadrant::NW => (Move::N, Move::W),
            Quadrant::SW => (Move::W, Move::S),
            Quadrant::SE => (Move::S, Move::E),
        }
    }

    pub fn first_move(self) -> Move {
        self.moves().0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GeomState {
    Init,
    /// On the longitudinal leg; `more` says whether the next step is
    /// longitudinal too.
    Leg1 { quadrant: Quadrant, more: bool },
    Leg2 { quadrant: Quadrant },
    Done,
}

/// Enabled transitions of a geometric walker. Sensing is never consulted.
pub fn geom_enabled(state: GeomState) -> Enabled<GeomState> {
    match state {
        GeomState::Init => Quadrant::ALL
            .iter()
            .flat_map(|&quadrant| {
                [false, true].map(|more| (GeomState::Leg1 { quadrant, more }, quadrant.first_move()))
            })
            .collect(),
        GeomState::Leg1 { quadrant, more: true } => {
            let long = quadrant.moves().0;
            smallvec![
                (GeomState::Leg1 { quadrant, more: true }, long),
                (GeomState::Leg1 { quadrant, more: false }, long),
            ]
        }
        GeomState::Leg1 { quadrant, more: false } | GeomState::Leg2 { quadrant } => {
            smallvec![
                (GeomState::Leg2 { quadrant }, quadrant.moves().1),
                (GeomState::Done, Move::P),
            ]
        }
        GeomState::Done => smallvec![(GeomState::Done, Move::P)],
    }
}

/// Reference law of the walk length after the mandatory first step:
/// `P(X = k) = (k + 1) 2^-(k + 2)`.
pub fn walk_length_pmf(k: u64) -> f64 {
    if k > 1100 {
        return 0.0;
    }
    (k + 1) as f64 * (-((k + 2) as f64)).exp2()
}

/// Walk length of agent `id` started at round `start`, drawing exactly as the
/// engine would for that agent.
pub fn walk_length(rng: &RngStream, id: AgentId, start: u64) -> u64 {
    let mut state = GeomState::Init;
    let mut round = start;
    let mut moves = 0u64;
    loop {
        let enabled = geom_enabled(state);
        let pick = match enabled.len() {
            1 => 0,
            len => rng.choose(len, id, round, 0),
        };
        let (next, mv) = enabled[pick];
        if state != GeomState::Init && mv != Move::P {
            moves += 1;
        }
        if next == GeomState::Done {
            return moves;
        }
        state = next;
        round += 1;
    }
}

/// Walk lengths of agents `0..count`, each started at round 0.
pub fn sample_walk_lengths(rng: &RngStream, count: usize) -> Vec<u64> {
    (0..count as AgentId).map(|id| walk_length(rng, id, 0)).collect()
}
