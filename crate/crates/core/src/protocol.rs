//! The full agent state space and the strategy-level controller.
//!
//! All four strategies run the same transition function over
//! [`AgentState`]; they differ only in the initial state and in whether the
//! harness emits teams by oracle.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use smallvec::smallvec;

use crate::emission::{psta_enabled, ElectorState};
use crate::engine::{Controller, Enabled, LocalInput, Move};
use crate::geom_search::{geom_enabled, GeomState};
use crate::hybrid::coin_enabled;
use crate::rect_search::{rect_transition, RectAgentState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AgentState {
    /// Held at the origin until the oracle emits it. Invisible to all rules.
    Idle,
    Rect(RectAgentState),
    Elect(ElectorState),
    Geom(GeomState),
    /// Hybrid start state, before the branch coin.
    Coin,
}

impl AgentState {
    /// Short variant name used in traces.
    pub fn tag(&self) -> &'static str {
        use crate::rect_search::RectKind;
        match self {
            AgentState::Idle => "Idle",
            AgentState::Coin => "HInit",
            AgentState::Rect(r) => match r.kind() {
                RectKind::FreshGuide => "FreshGuide",
                RectKind::Guide => "Guide",
                RectKind::MovingGuide => "MovingGuide",
                RectKind::FreshExplorer => "FreshExplorer",
                RectKind::Explorer => "Explorer",
                RectKind::MovingExplorer => "MovingExplorer",
            },
            AgentState::Elect(e) => e.tag(),
            AgentState::Geom(g) => match g {
                GeomState::Init => "GInit",
                GeomState::Leg1 { .. } => "Leg1",
                GeomState::Leg2 { .. } => "Leg2",
                GeomState::Done => "GDone",
            },
        }
    }

    pub fn rect(&self) -> Option<&RectAgentState> {
        match self {
            AgentState::Rect(r) => Some(r),
            _ => None,
        }
    }
}

fn is_rect(s: &AgentState) -> bool {
    matches!(s, AgentState::Rect(_))
}

fn is_elect(s: &AgentState) -> bool {
    matches!(s, AgentState::Elect(_))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    RectOracle,
    RectPsta,
    Geom,
    Hybrid,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::RectOracle,
        Strategy::RectPsta,
        Strategy::Geom,
        Strategy::Hybrid,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::RectOracle => "rect-oracle",
            Strategy::RectPsta => "rect-psta",
            Strategy::Geom => "geom",
            Strategy::Hybrid => "hybrid",
        }
    }

    /// Strategies that need whole five-agent teams.
    pub fn is_rect(self) -> bool {
        matches!(self, Strategy::RectOracle | Strategy::RectPsta)
    }

    pub fn initial_state(self) -> AgentState {
        match self {
            Strategy::RectOracle => AgentState::Idle,
            Strategy::RectPsta => AgentState::Elect(ElectorState::initial()),
            Strategy::Geom => AgentState::Geom(GeomState::Init),
            Strategy::Hybrid => AgentState::Coin,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown strategy `{s}` (expected rect-oracle, rect-psta, geom or hybrid)"))
    }
}

/// Transition function shared by every strategy. Each family only senses its
/// own family's states.
pub fn transition(state: AgentState, input: &LocalInput<'_, AgentState>) -> Enabled<AgentState> {
    match state {
        AgentState::Idle => smallvec![(AgentState::Idle, Move::P)],
        AgentState::Rect(r) => {
            let (next, mv) = rect_transition(r, &input.restricted(is_rect));
            smallvec![(AgentState::Rect(next), mv)]
        }
        AgentState::Elect(e) => psta_enabled(e, &input.restricted(is_elect)),
        AgentState::Geom(g) => geom_enabled(g)
            .into_iter()
            .map(|(s, m)| (AgentState::Geom(s), m))
            .collect(),
        AgentState::Coin => coin_enabled(),
    }
}

/// Controller for one strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Protocol {
    pub strategy: Strategy,
}

impl Protocol {
    pub fn new(strategy: Strategy) -> Self {
        Self { strategy }
    }
}

impl Controller for Protocol {
    type State = AgentState;

    fn initial_state(&self) -> AgentState {
        self.strategy.initial_state()
    }

    fn enabled(&self, state: AgentState, input: &LocalInput<'_, AgentState>) -> Enabled<AgentState> {
        transition(state, input)
    }
}
