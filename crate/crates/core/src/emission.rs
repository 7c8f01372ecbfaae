//! Producing search teams at the origin.
//!
//! Two schemes are provided. [`OracleEmission`] is a harness-level hook that
//! releases one team per round from a pool of idle agents. The elected
//! scheme runs entirely inside the agents' finite-state controller:
//!
//! 1. Agents stream east along the ray `(x, 0), x > 0`. Each elector round has
//!    an intent phase, where an agent publishes a coin flip (move or stay),
//!    and a commit phase, where movers leave unless that would empty the
//!    cell. An agent that finds itself alone off the origin is elected
//!    (`Ready`) and stops.
//! 2. The distance of a ready cell mod 5 fixes the leader's role: explorer
//!    at 1, then guides N, E, S, W.
//! 3. A ready explorer holding the flag collects its four guides eastwards,
//!    drops the flag on the next explorer cell and walks the team back to the
//!    origin, where it turns into a fresh search team.
//!
//! Collection only proceeds through cells that no longer hold unelected
//! agents. Together with the stay rule this keeps every collected cell empty
//! for good, so teams are built strictly one after another.

use serde::{Deserialize, Serialize};
use smallvec::smallvec;
use thiserror::Error;

use crate::engine::{AgentId, EngineError, Enabled, LocalInput, Move, RoundHook, World, ORIGIN};
use crate::protocol::AgentState;
use crate::rect_search::{team_states, Dir, RectAgentState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    Explorer,
    GuideN,
    GuideE,
    GuideS,
    GuideW,
}

/// Guides are collected in this order, moving east.
pub const GUIDE_ORDER: [Role; 4] = [Role::GuideN, Role::GuideE, Role::GuideS, Role::GuideW];

impl Role {
    pub fn guide_dir(self) -> Option<Dir> {
        match self {
            Role::Explorer => None,
            Role::GuideN => Some(Dir::N),
            Role::GuideE => Some(Dir::E),
            Role::GuideS => Some(Dir::S),
            Role::GuideW => Some(Dir::W),
        }
    }

    /// State taken at the origin when the team is released.
    pub fn fresh_state(self, first: bool) -> RectAgentState {
        match self.guide_dir() {
            None => RectAgentState::FreshExplorer {
                seen_guide: false,
                first,
            },
            Some(dir) => RectAgentState::FreshGuide {
                dir,
                seen_guide: false,
                first,
            },
        }
    }
}

/// Role dedicated to ray cells at distance `m` mod 5.
pub fn role_of(m: u8) -> Role {
    match m % 5 {
        1 => Role::Explorer,
        2 => Role::GuideN,
        3 => Role::GuideE,
        4 => Role::GuideS,
        _ => Role::GuideW,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Phase {
    Intent,
    Commit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Decision {
    Move,
    Stay,
    /// Must leave regardless of the others (lone at the origin, or the cell
    /// already has a leader).
    Forced,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ElectorState {
    /// Unelected agent on the origin or the ray. `drained` marks agents that
    /// saw the last agent leave the origin.
    Elector {
        phase: Phase,
        decision: Decision,
        dist_mod5: u8,
        flag: bool,
        adj_origin: bool,
        drained: bool,
    },
    Ready {
        role: Role,
        flag: bool,
        adj_origin: bool,
        drained: bool,
    },
    /// A ready explorer gathering its guides; `absorbed` guides so far.
    Collector { absorbed: u8, first: bool },
    CollectedGuide { role: Role },
    FlagTrip { first: bool },
    FlagReturn { first: bool },
    TeamReturn { role: Role, first: bool },
}

impl ElectorState {
    pub const fn initial() -> Self {
        ElectorState::Elector {
            phase: Phase::Intent,
            decision: Decision::Stay,
            dist_mod5: 0,
            flag: false,
            adj_origin: false,
            drained: false,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            ElectorState::Elector { .. } => "Elector",
            ElectorState::Ready { .. } => "Ready",
            ElectorState::Collector { .. } => "Collector",
            ElectorState::CollectedGuide { .. } => "CollectedGuide",
            ElectorState::FlagTrip { .. } => "FlagTrip",
            ElectorState::FlagReturn { .. } => "FlagReturn",
            ElectorState::TeamReturn { .. } => "TeamReturn",
        }
    }
}

/// What an elector-family agent can see in its cell.
struct View {
    elector: bool,
    ready: bool,
    stay_commit: bool,
    flag_trip: bool,
    drained: bool,
}

fn view(input: &LocalInput<'_, AgentState>) -> View {
    let mut v = View {
        elector: false,
        ready: false,
        stay_commit: false,
        flag_trip: false,
        drained: false,
    };
    for s in input.sensed() {
        let AgentState::Elect(e) = s else { continue };
        match e {
            ElectorState::Elector {
                phase,
                decision,
                drained,
                ..
            } => {
                v.elector = true;
                v.stay_commit |= phase == Phase::Commit && decision == Decision::Stay;
                v.drained |= drained;
            }
            ElectorState::Ready { drained, .. } => {
                v.ready = true;
                v.drained |= drained;
            }
            ElectorState::FlagTrip { .. } => v.flag_trip = true,
            _ => {}
        }
    }
    v
}

fn sensed_collector(input: &LocalInput<'_, AgentState>) -> Option<u8> {
    input.sensed().find_map(|s| match s {
        AgentState::Elect(ElectorState::Collector { absorbed, .. }) => Some(absorbed),
        _ => None,
    })
}

fn senses_ready_role(input: &LocalInput<'_, AgentState>, role: Role) -> bool {
    input.senses_any(|s| matches!(s, AgentState::Elect(ElectorState::Ready { role: r, .. }) if *r == role))
}

fn sensed_flag_return(input: &LocalInput<'_, AgentState>) -> Option<bool> {
    input.sensed().find_map(|s| match s {
        AgentState::Elect(ElectorState::FlagReturn { first }) => Some(first),
        _ => None,
    })
}

fn one(state: ElectorState, mv: Move) -> Enabled<AgentState> {
    smallvec![(AgentState::Elect(state), mv)]
}

/// Guide number `absorbed` can join the collector in this cell.
fn absorbable(absorbed: u8, input: &LocalInput<'_, AgentState>, v: &View) -> bool {
    (absorbed as usize) < GUIDE_ORDER.len()
        && !v.elector
        && senses_ready_role(input, GUIDE_ORDER[absorbed as usize])
}

/// Move of the collecting group after absorbing guide number `absorbed`.
fn group_move(absorbed: u8) -> Move {
    if absorbed < 3 {
        Move::E
    } else {
        Move::P
    }
}

/// Enabled transitions of an elector-family agent.
pub fn psta_enabled(state: ElectorState, input: &LocalInput<'_, AgentState>) -> Enabled<AgentState> {
    let v = view(input);
    match state {
        ElectorState::Elector {
            phase: Phase::Intent,
            dist_mod5,
            flag,
            adj_origin,
            drained,
            ..
        } => {
            let flag = flag || v.flag_trip;
            let drained = drained || v.drained;
            let commit = |decision| ElectorState::Elector {
                phase: Phase::Commit,
                decision,
                dist_mod5,
                flag,
                adj_origin,
                drained,
            };
            let forced = if input.at_origin() { !v.elector } else { v.ready };
            if forced {
                one(commit(Decision::Forced), Move::P)
            } else if !input.at_origin() && !v.elector {
                let ready = ElectorState::Ready {
                    role: role_of(dist_mod5),
                    flag: flag || adj_origin,
                    adj_origin,
                    drained,
                };
                one(ready, Move::P)
            } else {
                smallvec![
                    (AgentState::Elect(commit(Decision::Move)), Move::P),
                    (AgentState::Elect(commit(Decision::Stay)), Move::P),
                ]
            }
        }
        ElectorState::Elector {
            phase: Phase::Commit,
            decision,
            dist_mod5,
            flag,
            adj_origin,
            drained,
        } => {
            let moves = match decision {
                Decision::Forced => true,
                Decision::Move => v.stay_commit || v.ready,
                Decision::Stay => false,
            };
            let next = if moves {
                ElectorState::Elector {
                    phase: Phase::Intent,
                    decision: Decision::Stay,
                    dist_mod5: (dist_mod5 + 1) % 5,
                    flag: false,
                    adj_origin: input.at_origin(),
                    drained: input.at_origin() && decision == Decision::Forced,
                }
            } else {
                ElectorState::Elector {
                    phase: Phase::Intent,
                    decision: Decision::Stay,
                    dist_mod5,
                    flag: flag || v.flag_trip,
                    adj_origin,
                    drained: drained || v.drained,
                }
            };
            one(next, if moves { Move::E } else { Move::P })
        }
        ElectorState::Ready {
            role,
            flag,
            adj_origin,
            drained,
        } => {
            let flag = flag || v.flag_trip;
            let drained = drained || v.drained;
            match role {
                // The cell next to the origin keeps receiving agents until
                // the origin is empty.
                Role::Explorer if flag && !v.elector && (!adj_origin || drained) => one(
                    ElectorState::Collector {
                        absorbed: 0,
                        first: adj_origin,
                    },
                    Move::E,
                ),
                Role::Explorer => one(
                    ElectorState::Ready {
                        role,
                        flag,
                        adj_origin,
                        drained,
                    },
                    Move::P,
                ),
                guide => match sensed_collector(input) {
                    Some(k)
                        if (k as usize) < GUIDE_ORDER.len()
                            && GUIDE_ORDER[k as usize] == guide
                            && !v.elector =>
                    {
                        one(ElectorState::CollectedGuide { role: guide }, group_move(k))
                    }
                    _ => one(
                        ElectorState::Ready {
                            role,
                            flag,
                            adj_origin,
                            drained,
                        },
                        Move::P,
                    ),
                },
            }
        }
        ElectorState::Collector { absorbed, first } => {
            if absorbable(absorbed, input, &v) {
                if absorbed < 3 {
                    one(
                        ElectorState::Collector {
                            absorbed: absorbed + 1,
                            first,
                        },
                        Move::E,
                    )
                } else {
                    one(ElectorState::FlagTrip { first }, Move::E)
                }
            } else {
                one(state, Move::P)
            }
        }
        ElectorState::CollectedGuide { role } => {
            if let Some(first) = sensed_flag_return(input) {
                one(ElectorState::TeamReturn { role, first }, Move::W)
            } else {
                match sensed_collector(input) {
                    Some(k) if absorbable(k, input, &v) => one(state, group_move(k)),
                    _ => one(state, Move::P),
                }
            }
        }
        ElectorState::FlagTrip { first } => one(ElectorState::FlagReturn { first }, Move::W),
        ElectorState::FlagReturn { first } => one(
            ElectorState::TeamReturn {
                role: Role::Explorer,
                first,
            },
            Move::W,
        ),
        ElectorState::TeamReturn { role, first } => {
            if input.at_origin() {
                smallvec![(AgentState::Rect(role.fresh_state(first)), Move::P)]
            } else {
                one(state, Move::W)
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmissionError {
    #[error("a team needs exactly five members, got {0}")]
    TeamSize(usize),
    #[error("agent {0} is not at the origin")]
    NotAtOrigin(AgentId),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Turn five agents at the origin into a fresh search team: the first id
/// becomes the explorer, the rest guides N, E, S, W.
pub fn emit_team(
    world: &mut World<AgentState>,
    ids: &[AgentId],
    first: bool,
) -> Result<(), EmissionError> {
    if ids.len() != 5 {
        return Err(EmissionError::TeamSize(ids.len()));
    }
    for &id in ids {
        if world.agent(id)?.pos != ORIGIN {
            return Err(EmissionError::NotAtOrigin(id));
        }
    }
    for (&id, state) in ids.iter().zip(team_states(first)) {
        world.set_state(id, AgentState::Rect(state))?;
    }
    Ok(())
}

/// Releases one team per round from the idle pool, at rounds `1..=n/5`.
#[derive(Clone, Debug)]
pub struct OracleEmission {
    teams: u64,
    emitted: u64,
}

impl OracleEmission {
    pub fn new(n: usize) -> Self {
        Self {
            teams: (n / 5) as u64,
            emitted: 0,
        }
    }

    pub fn emitted(&self) -> u64 {
        self.emitted
    }
}

impl RoundHook<AgentState> for OracleEmission {
    fn prepare(&mut self, world: &mut World<AgentState>) {
        if self.emitted >= self.teams || world.round() <= self.emitted {
            return;
        }
        let ids: Vec<AgentId> = world
            .agents()
            .iter()
            .filter(|a| a.state == AgentState::Idle && a.pos == ORIGIN)
            .take(5)
            .map(|a| a.id)
            .collect();
        if ids.len() == 5 {
            emit_team(world, &ids, self.emitted == 0).expect("idle agents sit at the origin");
            self.emitted += 1;
        }
    }

    fn observe(&mut self, _world: &World<AgentState>) {}
}
