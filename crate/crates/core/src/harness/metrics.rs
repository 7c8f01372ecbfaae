//! Observers that turn a stream of world snapshots into metrics.

use std::collections::BTreeMap;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use crate::emission::ElectorState;
use crate::engine::{Coord, RoundHook, World, ORIGIN};
use crate::hybrid::{branch_of, Branch};
use crate::protocol::{AgentState, Strategy};
use crate::rect_search::{RectAgentState, RectKind};

use super::invariants::{Rule, ViolationLog};
use super::placement::diamond_cells;

/// Lower bound on the explorer share of exploring agents after `t0`.
pub const EXPLORING_FRACTION: f64 = 7.0 / 8.0;

/// Exploring-agent head count for one round.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ExploringCount {
    pub fresh: u32,
    pub explorers: u32,
    pub moving: u32,
}

impl ExploringCount {
    pub fn total(&self) -> u32 {
        self.fresh + self.explorers + self.moving
    }

    /// Share of explorers among exploring agents; `None` if there are none.
    pub fn fraction(&self) -> Option<f64> {
        (self.total() > 0).then(|| f64::from(self.explorers) / f64::from(self.total()))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LevelMetrics {
    /// Level -> start round.
    pub starts: BTreeMap<u64, u64>,
    /// Level -> finish round.
    pub finishes: BTreeMap<u64, u64>,
    /// First round after the last emission with no fresh explorer.
    pub t0: Option<u64>,
    /// Round of each team emission, in order.
    pub emissions: Vec<u64>,
    /// Distinct cells visited by explorers, cumulative, per round.
    pub cells_explored: Vec<u64>,
    /// Exploring agents per round.
    pub exploring: Vec<ExploringCount>,
}

impl LevelMetrics {
    /// Teams emitted by round `t` inclusive.
    pub fn teams_emitted_by(&self, t: u64) -> usize {
        self.emissions.partition_point(|&r| r <= t)
    }

    /// Smallest explorer share over rounds after `t0`.
    pub fn min_exploring_fraction(&self) -> Option<f64> {
        let t0 = self.t0? as usize;
        self.exploring
            .iter()
            .skip(t0 + 1)
            .filter_map(ExploringCount::fraction)
            .min_by(f64::total_cmp)
    }

    /// Rounds after `t0` where the explorer share is below the bound.
    pub fn exploring_dips(&self) -> Vec<u64> {
        let Some(t0) = self.t0 else { return Vec::new() };
        self.exploring
            .iter()
            .enumerate()
            .skip(t0 as usize + 1)
            .filter(|(_, c)| c.fraction().is_some_and(|f| f < EXPLORING_FRACTION))
            .map(|(t, _)| t as u64)
            .collect()
    }
}

struct Sweep {
    level: u64,
    start: u64,
    visited: FxHashSet<Coord>,
}

/// Detects level starts and finishes, team emissions, `t0`, and explored
/// cells from ground-truth positions.
#[derive(Default)]
pub struct LevelRecorder {
    pub metrics: LevelMetrics,
    pub log: ViolationLog,
    prev: Vec<(Coord, AgentState)>,
    sweeps: FxHashMap<u32, Sweep>,
    explored: FxHashSet<Coord>,
    last_fresh_round: Option<u64>,
}

fn exploring(s: &AgentState) -> bool {
    s.rect().is_some_and(RectAgentState::is_exploring)
}

impl LevelRecorder {
    pub fn new() -> Self {
        Self::default()
    }

    fn record_start(&mut self, id: u32, level: u64, round: u64, from: Coord, to: Coord) {
        if let Some(&s) = self.metrics.starts.get(&level) {
            self.log.push(
                round,
                Rule::DuplicateStart,
                format!("level {level} started at {s} and again by agent {id}"),
            );
            return;
        }
        // s_d - d must be non-decreasing in d.
        let key = round as i128 - level as i128;
        let below = self.metrics.starts.range(..level).next_back();
        let above = self.metrics.starts.range(level + 1..).next();
        if let Some((&d, &s)) = below {
            if (s as i128 - d as i128) > key {
                self.log.push(
                    round,
                    Rule::StartGap,
                    format!("level {level} starts at {round}, level {d} at {s}"),
                );
            }
        }
        if let Some((&d, &s)) = above {
            if (s as i128 - d as i128) < key {
                self.log.push(
                    round,
                    Rule::StartGap,
                    format!("level {level} starts at {round}, level {d} at {s}"),
                );
            }
        }
        self.metrics.starts.insert(level, round);
        let mut visited = FxHashSet::default();
        visited.insert(from);
        visited.insert(to);
        self.sweeps.insert(id, Sweep { level, start: round, visited });
    }

    fn record_finish(&mut self, id: u32, level: u64, round: u64) {
        if self.metrics.finishes.insert(level, round).is_some() {
            self.log
                .push(round, Rule::DuplicateFinish, format!("level {level} finished twice"));
        }
        let Some(sweep) = self.sweeps.remove(&id) else {
            self.log.push(
                round,
                Rule::SweepTime,
                format!("agent {id} finished level {level} without starting it"),
            );
            return;
        };
        if sweep.level != level {
            self.log.push(
                round,
                Rule::SweepTime,
                format!("agent {id} started level {} but finished level {level}", sweep.level),
            );
            return;
        }
        if round - sweep.start != 8 * level {
            self.log.push(
                round,
                Rule::SweepTime,
                format!("level {level}: start {} finish {round}", sweep.start),
            );
        }
        let missed = diamond_cells(level)
            .into_iter()
            .filter(|c| !sweep.visited.contains(c))
            .count();
        if missed > 0 {
            self.log.push(
                round,
                Rule::Coverage,
                format!("level {level}: {missed} cells not visited during the sweep"),
            );
        }
    }

    fn observe_emissions(&mut self, world: &World<AgentState>) {
        let round = world.round();
        let mut explorers = 0u32;
        let mut guides = [0u32; 4];
        for a in world.agents().iter().filter(|a| a.pos == ORIGIN) {
            match a.state {
                AgentState::Rect(RectAgentState::FreshExplorer { .. }) => explorers += 1,
                AgentState::Rect(RectAgentState::FreshGuide { dir, .. }) => guides[dir as usize] += 1,
                _ => {}
            }
        }
        if explorers == 0 && guides.iter().all(|&g| g == 0) {
            return;
        }
        // Fresh agents leave the origin in the round after they appear.
        if explorers > 1 {
            self.log.push(
                round,
                Rule::DistinctEmission,
                format!("{explorers} teams emitted in the same round"),
            );
        }
        if guides.iter().any(|&g| g != explorers) {
            self.log.push(
                round,
                Rule::TeamIntegrity,
                format!("{explorers} fresh explorers with guides N/E/S/W = {guides:?}"),
            );
        }
        for _ in 0..explorers {
            self.metrics.emissions.push(round);
        }
    }

    pub fn record(&mut self, world: &World<AgentState>) {
        let round = world.round();
        self.observe_emissions(world);
        let mut count = ExploringCount::default();
        let have_prev = self.prev.len() == world.len();
        for (i, a) in world.agents().iter().enumerate() {
            let kind = a.state.rect().map(RectAgentState::kind);
            match kind {
                Some(RectKind::FreshExplorer) => count.fresh += 1,
                Some(RectKind::Explorer) => {
                    count.explorers += 1;
                    self.explored.insert(a.pos);
                }
                Some(RectKind::MovingExplorer) => count.moving += 1,
                _ => {}
            }
            if !have_prev || !exploring(&a.state) {
                continue;
            }
            let (from, prev_state) = self.prev[i];
            if !exploring(&prev_state) {
                continue;
            }
            if from.x == 0 && from.y > 0 && a.pos == Coord::new(-1, from.y) {
                self.record_start(a.id, from.y as u64, round - 1, from, a.pos);
            } else if let Some(s) = self.sweeps.get_mut(&a.id) {
                s.visited.insert(a.pos);
            }
            if a.pos.x == 0 && a.pos.y > 0 && from == Coord::new(1, a.pos.y) {
                self.record_finish(a.id, a.pos.y as u64, round);
            }
        }
        if count.fresh > 0 {
            self.last_fresh_round = Some(round);
        }
        self.metrics.exploring.push(count);
        self.metrics.cells_explored.push(self.explored.len() as u64);
        self.prev.clear();
        self.prev.extend(world.agents().iter().map(|a| (a.pos, a.state)));
    }

    pub fn finish(mut self) -> (LevelMetrics, ViolationLog) {
        self.metrics.t0 = self.last_fresh_round.map(|r| r + 1);
        (self.metrics, self.log)
    }
}

impl RoundHook<AgentState> for LevelRecorder {
    fn observe(&mut self, world: &World<AgentState>) {
        self.record(world);
    }
}

/// First round each ray cell `(x, 0), x > 0` holds a ready agent.
#[derive(Debug, Default)]
pub struct RayRecorder {
    /// Index `x - 1`.
    pub ready: Vec<Option<u64>>,
}

impl RayRecorder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Latest first-ready round over cells `1..=cells`, or `None` if one of
    /// them never became ready.
    pub fn all_ready_by(&self, cells: usize) -> Option<u64> {
        if self.ready.len() < cells {
            return None;
        }
        self.ready[..cells].iter().try_fold(0, |acc, r| r.map(|r| acc.max(r)))
    }
}

impl RoundHook<AgentState> for RayRecorder {
    fn observe(&mut self, world: &World<AgentState>) {
        for a in world.agents() {
            if let AgentState::Elect(ElectorState::Ready { .. }) = a.state {
                if a.pos.y == 0 && a.pos.x > 0 {
                    let i = a.pos.x as usize - 1;
                    if self.ready.len() <= i {
                        self.ready.resize(i + 1, None);
                    }
                    self.ready[i].get_or_insert(world.round());
                }
            }
        }
    }
}

/// First-visit round of each cell in a target set.
#[derive(Debug)]
pub struct FirstVisit {
    level: Option<u64>,
    first: FxHashMap<Coord, Option<u64>>,
    remaining: usize,
}

impl FirstVisit {
    pub fn new(cells: impl IntoIterator<Item = Coord>) -> Self {
        let first: FxHashMap<Coord, Option<u64>> = cells.into_iter().map(|c| (c, None)).collect();
        let remaining = first.len();
        Self {
            level: None,
            first,
            remaining,
        }
    }

    pub fn level(d: u64) -> Self {
        Self {
            level: Some(d),
            ..Self::new(diamond_cells(d))
        }
    }

    pub fn get(&self, c: Coord) -> Option<u64> {
        self.first.get(&c).copied().flatten()
    }

    pub fn complete(&self) -> bool {
        self.remaining == 0
    }

    /// Latest first visit and its cell (lowest in cell order on ties), once
    /// every cell has been visited.
    pub fn worst(&self) -> Option<(Coord, u64)> {
        if !self.complete() {
            return None;
        }
        self.first
            .iter()
            .map(|(&c, &r)| (c, r.expect("complete")))
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
    }
}

impl RoundHook<AgentState> for FirstVisit {
    fn observe(&mut self, world: &World<AgentState>) {
        for a in world.agents() {
            if self.level.is_some_and(|d| a.pos.norm() != d) {
                continue;
            }
            if let Some(slot) = self.first.get_mut(&a.pos) {
                if slot.is_none() {
                    *slot = Some(world.round());
                    self.remaining -= 1;
                }
            }
        }
    }

    fn done(&self) -> bool {
        self.complete()
    }
}

/// Branch sizes of a hybrid run, read once the coin has been tossed.
#[derive(Debug, Default)]
pub struct BranchCounter {
    pub sizes: Option<(u64, u64)>,
}

impl RoundHook<AgentState> for BranchCounter {
    fn observe(&mut self, world: &World<AgentState>) {
        if self.sizes.is_some() || world.round() == 0 {
            return;
        }
        let (mut r, mut g) = (0, 0);
        for a in world.agents() {
            match branch_of(&a.state) {
                Some(Branch::Rect) => r += 1,
                Some(Branch::Geom) => g += 1,
                None => {}
            }
        }
        self.sizes = Some((r, g));
    }
}

/// Everything measured in one run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunMetrics {
    pub run_id: String,
    pub seed: u64,
    pub n: usize,
    pub strategy: Strategy,
    pub distance: Option<u64>,
    /// Treasure cell; for worst-of-level runs, the slowest cell.
    pub treasure: Option<Coord>,
    pub discovery_round: Option<u64>,
    pub rounds_simulated: u64,
    pub n_r: Option<u64>,
    pub n_g: Option<u64>,
    pub levels: LevelMetrics,
    /// First ready round per ray cell (elected emission only).
    pub ray_ready: Vec<Option<u64>>,
    pub violations: Vec<super::invariants::Violation>,
    pub violation_count: u64,
}
