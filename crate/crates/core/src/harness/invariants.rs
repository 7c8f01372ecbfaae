//! Per-round global invariants, checked against true coordinates.

use std::fmt;

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::emission::{role_of, ElectorState};
use crate::engine::{l1_distance, Coord, RoundHook, World, ORIGIN};
use crate::protocol::AgentState;
use crate::rect_search::{Dir, RectAgentState, RectKind};

/// Stored violations per run; later ones are only counted.
pub const VIOLATION_CAP: usize = 1000;

/// Minimum distance between two moving explorers.
pub const EXPLORER_SPACING: u64 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Exclusion,
    GuideContiguity,
    ExplorerSpacing,
    SweepTime,
    StartGap,
    DuplicateStart,
    DuplicateFinish,
    Coverage,
    DistinctEmission,
    TeamIntegrity,
    Mod5,
    FlagUniqueness,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::Exclusion => "exclusion",
            Rule::GuideContiguity => "guide-contiguity",
            Rule::ExplorerSpacing => "explorer-spacing",
            Rule::SweepTime => "sweep-time",
            Rule::StartGap => "start-gap",
            Rule::DuplicateStart => "duplicate-start",
            Rule::DuplicateFinish => "duplicate-finish",
            Rule::Coverage => "coverage",
            Rule::DistinctEmission => "distinct-emission",
            Rule::TeamIntegrity => "team-integrity",
            Rule::Mod5 => "mod5",
            Rule::FlagUniqueness => "flag-uniqueness",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub round: u64,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "round {}: {}: {}", self.round, self.rule.as_str(), self.detail)
    }
}

/// Capped violation list.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ViolationLog {
    pub stored: Vec<Violation>,
    pub total: u64,
}

impl ViolationLog {
    pub fn push(&mut self, round: u64, rule: Rule, detail: impl Into<String>) {
        self.total += 1;
        if self.stored.len() < VIOLATION_CAP {
            self.stored.push(Violation {
                round,
                rule,
                detail: detail.into(),
            });
        }
    }

    pub fn extend(&mut self, other: ViolationLog) {
        self.total += other.total;
        let room = VIOLATION_CAP.saturating_sub(self.stored.len());
        self.stored.extend(other.stored.into_iter().take(room));
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn count(&self, rule: Rule) -> usize {
        self.stored.iter().filter(|v| v.rule == rule).count()
    }
}

fn axis_offset(dir: Dir, c: Coord) -> Option<i64> {
    let (along, across) = match dir {
        Dir::N => (c.y, c.x),
        Dir::S => (-c.y, c.x),
        Dir::E => (c.x, c.y),
        Dir::W => (-c.x, c.y),
    };
    (across == 0 && along > 0).then_some(along)
}

/// Exclusion, guide contiguity, explorer spacing and the elected-emission
/// bookkeeping rules.
#[derive(Debug, Default)]
pub struct InvariantChecker {
    pub log: ViolationLog,
}

impl InvariantChecker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn check(&mut self, world: &World<AgentState>) {
        let round = world.round();
        let mut kinds: FxHashMap<(Coord, RectKind), u32> = FxHashMap::default();
        let mut guides: [Vec<i64>; 4] = Default::default();
        let mut movers: Vec<Coord> = Vec::new();
        let mut ready_cells: FxHashMap<Coord, u32> = FxHashMap::default();
        let mut flag_cells: Vec<Coord> = Vec::new();

        for a in world.agents() {
            match a.state {
                AgentState::Rect(r) => {
                    if a.pos != ORIGIN {
                        *kinds.entry((a.pos, r.kind())).or_default() += 1;
                    }
                    match r {
                        RectAgentState::Guide { dir } => match axis_offset(dir, a.pos) {
                            Some(k) => guides[dir as usize].push(k),
                            None => self.log.push(
                                round,
                                Rule::GuideContiguity,
                                format!("{dir:?} guide {} off its axis at {:?}", a.id, a.pos),
                            ),
                        },
                        RectAgentState::MovingExplorer => movers.push(a.pos),
                        _ => {}
                    }
                }
                AgentState::Elect(e) => self.check_elector(round, a.id, a.pos, e, &mut ready_cells, &mut flag_cells),
                _ => {}
            }
        }

        let mut crowded: Vec<_> = kinds.into_iter().filter(|&(_, c)| c > 1).collect();
        crowded.sort_unstable();
        for ((cell, kind), count) in crowded {
            self.log
                .push(round, Rule::Exclusion, format!("{count} agents of type {kind:?} at {cell:?}"));
        }

        for (dir, mut offsets) in Dir::ALL.into_iter().zip(guides) {
            offsets.sort_unstable();
            if let Some(w) = offsets.windows(2).find(|w| w[1] != w[0] + 1) {
                self.log.push(
                    round,
                    Rule::GuideContiguity,
                    format!("{dir:?} guides at offsets {} and {} leave a gap", w[0], w[1]),
                );
            }
        }

        movers.sort_unstable();
        for (i, &a) in movers.iter().enumerate() {
            for &b in &movers[i + 1..] {
                if l1_distance(a, b) < EXPLORER_SPACING {
                    self.log.push(
                        round,
                        Rule::ExplorerSpacing,
                        format!("moving explorers at {a:?} and {b:?}"),
                    );
                }
            }
        }

        flag_cells.sort_unstable();
        flag_cells.dedup();
        if flag_cells.len() > 1 {
            self.log
                .push(round, Rule::FlagUniqueness, format!("flag held in cells {flag_cells:?}"));
        }
        let mut doubled: Vec<_> = ready_cells.into_iter().filter(|&(_, c)| c > 1).collect();
        doubled.sort_unstable();
        for (cell, count) in doubled {
            self.log
                .push(round, Rule::FlagUniqueness, format!("{count} ready agents at {cell:?}"));
        }
    }

    fn check_elector(
        &mut self,
        round: u64,
        id: u32,
        pos: Coord,
        e: ElectorState,
        ready_cells: &mut FxHashMap<Coord, u32>,
        flag_cells: &mut Vec<Coord>,
    ) {
        let on_ray = pos.y == 0 && pos.x >= 0;
        let dist = pos.x.rem_euclid(5) as u8;
        match e {
            ElectorState::Elector { dist_mod5, flag, .. } => {
                if !on_ray || dist_mod5 != dist {
                    self.log.push(
                        round,
                        Rule::Mod5,
                        format!("elector {id} at {pos:?} counts {dist_mod5} mod 5"),
                    );
                }
                if flag {
                    flag_cells.push(pos);
                }
            }
            ElectorState::Ready { role, flag, .. } => {
                if !on_ray || pos.x == 0 || role != role_of(dist) {
                    self.log
                        .push(round, Rule::Mod5, format!("ready {id} at {pos:?} has role {role:?}"));
                }
                *ready_cells.entry(pos).or_default() += 1;
                if flag {
                    flag_cells.push(pos);
                }
            }
            _ => {}
        }
    }
}

impl RoundHook<AgentState> for InvariantChecker {
    fn observe(&mut self, world: &World<AgentState>) {
        self.check(world);
    }
}
