//! Synchronous-round world model.
//!
//! Agents live on the infinite grid and run a shared randomized controller.
//! A round is evaluated in two phases: every agent first computes its next
//! `(state, move)` from an immutable snapshot of the current round, then all
//! updates are applied at once. Randomness comes from [`RngStream`], keyed by
//! `(agent id, round)`, so a round's outcome does not depend on evaluation
//! order or thread count.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;
use std::hash::Hash;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

use crate::rng::RngStream;

/// Agent identifier. Bookkeeping only; controllers never see it.
pub type AgentId = u32;

/// Coordinates are kept well inside `i32` so that no run can wrap.
pub const COORD_LIMIT: i64 = 1 << 31;

/// Below this many agents a round is always evaluated on the calling thread.
#[cfg(feature = "parallel")]
const PAR_THRESHOLD: usize = 1024;

#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct Coord {
    pub x: i64,
    pub y: i64,
}

pub const ORIGIN: Coord = Coord { x: 0, y: 0 };

impl Coord {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    /// Distance to the origin.
    pub fn norm(self) -> u64 {
        self.x.unsigned_abs() + self.y.unsigned_abs()
    }

    pub fn shifted(self, m: Move) -> Self {
        apply_move(self, m)
    }
}

/// Manhattan distance.
pub fn l1_distance(a: Coord, b: Coord) -> u64 {
    a.x.abs_diff(b.x) + a.y.abs_diff(b.y)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Move {
    N,
    S,
    E,
    W,
    /// Stay put.
    P,
}

pub fn apply_move(c: Coord, m: Move) -> Coord {
    match m {
        Move::N => Coord::new(c.x, c.y + 1),
        Move::S => Coord::new(c.x, c.y - 1),
        Move::E => Coord::new(c.x + 1, c.y),
        Move::W => Coord::new(c.x - 1, c.y),
        Move::P => c,
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("a world needs at least one agent")]
    NoAgents,
    #[error("unknown agent id {0}")]
    UnknownAgent(AgentId),
    #[error("duplicate agent id {0}")]
    DuplicateAgent(AgentId),
    #[error("protocol error at round {round}: agent {agent} in state {state} has no enabled transition for input {input}")]
    EmptyEnabledSet {
        round: u64,
        agent: AgentId,
        state: String,
        input: String,
    },
    #[error("agent {agent} left the representable grid at ({x}, {y})")]
    OutOfRange { agent: AgentId, x: i64, y: i64 },
}

/// Bounds every controller state type must satisfy.
pub trait StateBound: Copy + Eq + Ord + Hash + Debug + Send + Sync {}
impl<T: Copy + Eq + Ord + Hash + Debug + Send + Sync> StateBound for T {}

/// Enabled transitions returned by a controller.
pub type Enabled<S> = SmallVec<[(S, Move); 8]>;

/// A protocol `(Q, s0, δ)`: `initial_state` is `s0`, `enabled` is `δ`.
///
/// `enabled` must be a pure function of its arguments and return a nonempty
/// set for every reachable input. The engine picks one element uniformly.
pub trait Controller: Sync {
    type State: StateBound;

    fn initial_state(&self) -> Self::State;

    fn enabled(&self, state: Self::State, input: &LocalInput<'_, Self::State>) -> Enabled<Self::State>;
}

/// What an agent perceives in a round.
///
/// `cell` lists the distinct states present in the agent's cell with their
/// multiplicities, the agent itself included; the agent's own contribution is
/// discounted when answering queries, so a state is sensed only if some other
/// agent holds it.
#[derive(Clone, Copy)]
pub struct LocalInput<'a, S> {
    cell: &'a [(S, u32)],
    own: S,
    at_origin: bool,
    at_treasure: bool,
    filter: Option<fn(&S) -> bool>,
}

impl<'a, S: StateBound> LocalInput<'a, S> {
    pub fn new(own: S, cell: &'a [(S, u32)], at_origin: bool, at_treasure: bool) -> Self {
        Self {
            cell,
            own,
            at_origin,
            at_treasure,
            filter: None,
        }
    }

    pub fn at_origin(&self) -> bool {
        self.at_origin
    }

    pub fn at_treasure(&self) -> bool {
        self.at_treasure
    }

    /// Same input, but only states accepted by `keep` remain visible.
    pub fn restricted(&self, keep: fn(&S) -> bool) -> Self {
        Self {
            filter: Some(keep),
            ..*self
        }
    }

    /// Distinct states held by at least one other agent in the cell.
    pub fn sensed(&self) -> impl Iterator<Item = S> + '_ {
        self.cell.iter().filter_map(move |&(s, count)| {
            let others = count - u32::from(s == self.own);
            let visible = self.filter.is_none_or(|keep| keep(&s));
            (others > 0 && visible).then_some(s)
        })
    }

    pub fn senses(&self, q: &S) -> bool {
        self.sensed().any(|s| s == *q)
    }

    pub fn senses_any(&self, pred: impl Fn(&S) -> bool) -> bool {
        self.sensed().any(|s| pred(&s))
    }

    pub fn sensed_set(&self) -> BTreeSet<S> {
        self.sensed().collect()
    }
}

impl<S: StateBound> Debug for LocalInput<'_, S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LocalInput")
            .field("sensed", &self.sensed_set())
            .field("at_origin", &self.at_origin)
            .field("at_treasure", &self.at_treasure)
            .finish()
    }
}

/// Owned cell contents, for building a [`LocalInput`] by hand.
#[derive(Clone, Debug)]
pub struct Occupants<S> {
    own: S,
    entries: Vec<(S, u32)>,
}

impl<S: StateBound> Occupants<S> {
    /// A cell holding an agent in state `own` and further agents in `others`.
    pub fn new(own: S, others: &[S]) -> Self {
        let mut all: Vec<S> = others.to_vec();
        all.push(own);
        Self {
            own,
            entries: run_length(&mut all),
        }
    }

    pub fn input(&self, at_origin: bool, at_treasure: bool) -> LocalInput<'_, S> {
        LocalInput::new(self.own, &self.entries, at_origin, at_treasure)
    }
}

fn run_length<S: StateBound>(states: &mut [S]) -> Vec<(S, u32)> {
    states.sort_unstable();
    let mut out: Vec<(S, u32)> = Vec::new();
    for &s in states.iter() {
        match out.last_mut() {
            Some((last, count)) if *last == s => *count += 1,
            _ => out.push((s, 1)),
        }
    }
    out
}

/// Owned copy of a [`LocalInput`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observation<S: Ord> {
    pub sensed: BTreeSet<S>,
    pub at_origin: bool,
    pub at_treasure: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Agent<S> {
    pub id: AgentId,
    pub state: S,
    pub pos: Coord,
}

/// How the per-agent phase of a round is scheduled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Exec {
    /// Calling thread, agents in id order.
    Sequential,
    /// Rayon work-stealing over agents (sequential without the `parallel` feature).
    #[default]
    Parallel,
    /// Calling thread, agents in a fresh pseudo-random order every round.
    Permuted(u64),
}

/// Per-round occupancy table built from a snapshot.
struct Occupancy<S> {
    cell_of: Vec<u32>,
    ranges: Vec<(u32, u32)>,
    entries: Vec<(S, u32)>,
}

impl<S: StateBound> Occupancy<S> {
    fn build(agents: &[Agent<S>]) -> Self {
        let n = agents.len();
        let mut index: FxHashMap<Coord, u32> =
            FxHashMap::with_capacity_and_hasher(n, Default::default());
        let mut cell_of = Vec::with_capacity(n);
        let mut counts: Vec<u32> = Vec::new();
        for a in agents {
            let next = counts.len() as u32;
            let c = *index.entry(a.pos).or_insert(next);
            if c == next {
                counts.push(0);
            }
            counts[c as usize] += 1;
            cell_of.push(c);
        }
        let mut offsets = Vec::with_capacity(counts.len() + 1);
        let mut acc = 0u32;
        offsets.push(0);
        for &c in &counts {
            acc += c;
            offsets.push(acc);
        }
        let mut slots = vec![agents[0].state; n];
        let mut cursor = offsets.clone();
        for (a, &c) in agents.iter().zip(&cell_of) {
            slots[cursor[c as usize] as usize] = a.state;
            cursor[c as usize] += 1;
        }
        let mut entries = Vec::with_capacity(n);
        let mut ranges = Vec::with_capacity(counts.len());
        for c in 0..counts.len() {
            let slice = &mut slots[offsets[c] as usize..offsets[c + 1] as usize];
            let start = entries.len() as u32;
            if slice.len() == 1 {
                entries.push((slice[0], 1));
            } else {
                entries.extend(run_length(slice));
            }
            ranges.push((start, entries.len() as u32));
        }
        Self {
            cell_of,
            ranges,
            entries,
        }
    }

    fn cell(&self, agent_index: usize) -> &[(S, u32)] {
        let (lo, hi) = self.ranges[self.cell_of[agent_index] as usize];
        &self.entries[lo as usize..hi as usize]
    }
}

/// Hooks invoked by [`run`] at every round barrier.
pub trait RoundHook<S> {
    /// May rewrite the world before it is observed (harness-level interventions).
    fn prepare(&mut self, _world: &mut World<S>) {}

    fn observe(&mut self, world: &World<S>);

    /// Request an early stop.
    fn done(&self) -> bool {
        false
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    pub discovery_round: Option<u64>,
    pub rounds: u64,
}

/// Round counter, agents (sorted by id) and the treasure cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct World<S> {
    round: u64,
    agents: Vec<Agent<S>>,
    treasure: Option<Coord>,
}

impl<S: StateBound> World<S> {
    /// `n` agents at the origin in state `s0`, round 0.
    pub fn new(n: usize, s0: S, treasure: Option<Coord>) -> Result<Self, EngineError> {
        if n == 0 {
            return Err(EngineError::NoAgents);
        }
        let agents = (0..n as AgentId)
            .map(|id| Agent {
                id,
                state: s0,
                pos: ORIGIN,
            })
            .collect();
        Ok(Self {
            round: 0,
            agents,
            treasure,
        })
    }

    pub fn from_agents(
        round: u64,
        mut agents: Vec<Agent<S>>,
        treasure: Option<Coord>,
    ) -> Result<Self, EngineError> {
        if agents.is_empty() {
            return Err(EngineError::NoAgents);
        }
        agents.sort_by_key(|a| a.id);
        if let Some(w) = agents.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(EngineError::DuplicateAgent(w[0].id));
        }
        Ok(Self {
            round,
            agents,
            treasure,
        })
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn agents(&self) -> &[Agent<S>] {
        &self.agents
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn treasure(&self) -> Option<Coord> {
        self.treasure
    }

    pub fn set_treasure(&mut self, treasure: Option<Coord>) {
        self.treasure = treasure;
    }

    fn index_of(&self, id: AgentId) -> Result<usize, EngineError> {
        self.agents
            .binary_search_by_key(&id, |a| a.id)
            .map_err(|_| EngineError::UnknownAgent(id))
    }

    pub fn agent(&self, id: AgentId) -> Result<&Agent<S>, EngineError> {
        self.index_of(id).map(|i| &self.agents[i])
    }

    /// Overwrite one agent's state (harness interventions and fault injection).
    pub fn set_state(&mut self, id: AgentId, state: S) -> Result<(), EngineError> {
        let i = self.index_of(id)?;
        self.agents[i].state = state;
        Ok(())
    }

    /// Occupied cells and the ids they hold.
    pub fn cell_index(&self) -> BTreeMap<Coord, Vec<AgentId>> {
        let mut map: BTreeMap<Coord, Vec<AgentId>> = BTreeMap::new();
        for a in &self.agents {
            map.entry(a.pos).or_default().push(a.id);
        }
        map
    }

    /// States held by other agents in `id`'s cell.
    pub fn sense(&self, id: AgentId) -> Result<BTreeSet<S>, EngineError> {
        let me = *self.agent(id)?;
        Ok(self
            .agents
            .iter()
            .filter(|a| a.id != id && a.pos == me.pos)
            .map(|a| a.state)
            .collect())
    }

    pub fn local_input(&self, id: AgentId) -> Result<Observation<S>, EngineError> {
        let me = *self.agent(id)?;
        Ok(Observation {
            sensed: self.sense(id)?,
            at_origin: me.pos == ORIGIN,
            at_treasure: self.treasure == Some(me.pos),
        })
    }

    pub fn discovered(&self) -> bool {
        self.treasure
            .is_some_and(|t| self.agents.iter().any(|a| a.pos == t))
    }

    /// Evaluate one synchronous round in place.
    pub fn advance<C>(&mut self, ctl: &C, rng: &RngStream, exec: Exec) -> Result<(), EngineError>
    where
        C: Controller<State = S>,
    {
        let occupancy = Occupancy::build(&self.agents);
        let decide = |i: usize| self.decide(i, &occupancy, ctl, rng);

        let decisions: Vec<(S, Move)> = match exec {
            Exec::Sequential => (0..self.agents.len()).map(decide).collect::<Result<_, _>>()?,
            Exec::Parallel => parallel_map(self.agents.len(), decide)?,
            Exec::Permuted(seed) => {
                let order = permutation(self.agents.len(), seed, self.round);
                let mut slots: Vec<Option<(S, Move)>> = vec![None; self.agents.len()];
                for i in order {
                    slots[i] = Some(decide(i)?);
                }
                slots.into_iter().map(|d| d.expect("every slot visited")).collect()
            }
        };

        for (agent, (state, mv)) in self.agents.iter_mut().zip(decisions) {
            let pos = apply_move(agent.pos, mv);
            if pos.x.abs() >= COORD_LIMIT || pos.y.abs() >= COORD_LIMIT {
                return Err(EngineError::OutOfRange {
                    agent: agent.id,
                    x: pos.x,
                    y: pos.y,
                });
            }
            agent.state = state;
            agent.pos = pos;
        }
        self.round += 1;
        Ok(())
    }

    fn decide<C>(
        &self,
        i: usize,
        occupancy: &Occupancy<S>,
        ctl: &C,
        rng: &RngStream,
    ) -> Result<(S, Move), EngineError>
    where
        C: Controller<State = S>,
    {
        let agent = &self.agents[i];
        let input = LocalInput::new(
            agent.state,
            occupancy.cell(i),
            agent.pos == ORIGIN,
            self.treasure == Some(agent.pos),
        );
        let enabled = ctl.enabled(agent.state, &input);
        match enabled.len() {
            0 => Err(EngineError::EmptyEnabledSet {
                round: self.round,
                agent: agent.id,
                state: format!("{:?}", agent.state),
                input: format!("{input:?}"),
            }),
            1 => Ok(enabled[0]),
            len => Ok(enabled[rng.choose(len, agent.id, self.round, 0)]),
        }
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, E, F>(len: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    use rayon::prelude::*;
    if len < PAR_THRESHOLD {
        (0..len).map(f).collect()
    } else {
        (0..len).into_par_iter().map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, E, F>(len: usize, f: F) -> Result<Vec<T>, E>
where
    F: Fn(usize) -> Result<T, E>,
{
    (0..len).map(f).collect()
}

/// Fisher-Yates permutation of `0..len` keyed by `(seed, round)`.
fn permutation(len: usize, seed: u64, round: u64) -> Vec<usize> {
    let rng = RngStream::new(seed);
    let mut order: Vec<usize> = (0..len).collect();
    for i in (1..len).rev() {
        let j = rng.choose(i + 1, AgentId::MAX, round, i as u32);
        order.swap(i, j);
    }
    order
}

/// Step `world` until an agent stands on the treasure, a hook asks to stop,
/// or `max_rounds` is reached. Hooks see every round including round 0.
pub fn run<C>(
    world: &mut World<C::State>,
    ctl: &C,
    rng: &RngStream,
    max_rounds: u64,
    hooks: &mut [&mut dyn RoundHook<C::State>],
    exec: Exec,
) -> Result<RunOutcome, EngineError>
where
    C: Controller,
{
    loop {
        for h in hooks.iter_mut() {
            h.prepare(world);
        }
        for h in hooks.iter_mut() {
            h.observe(world);
        }
        if world.discovered() {
            return Ok(RunOutcome {
                discovery_round: Some(world.round()),
                rounds: world.round(),
            });
        }
        if world.round() >= max_rounds || hooks.iter().any(|h| h.done()) {
            return Ok(RunOutcome {
                discovery_round: None,
                rounds: world.round(),
            });
        }
        world.advance(ctl, rng, exec)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Single-state controller that always takes one fixed move.
    struct Drift(Move);

    impl Controller for Drift {
        type State = u8;
        fn initial_state(&self) -> u8 {
            0
        }
        fn enabled(&self, s: u8, _: &LocalInput<'_, u8>) -> Enabled<u8> {
            smallvec::smallvec![(s, self.0)]
        }
    }

    /// From state 0: move east staying in 0, or stay put switching to 1.
    struct Coin;

    impl Controller for Coin {
        type State = u8;
        fn initial_state(&self) -> u8 {
            0
        }
        fn enabled(&self, s: u8, _: &LocalInput<'_, u8>) -> Enabled<u8> {
            match s {
                0 => smallvec::smallvec![(0, Move::E), (1, Move::P)],
                _ => smallvec::smallvec![(s, Move::P)],
            }
        }
    }

    struct Stuck;

    impl Controller for Stuck {
        type State = u8;
        fn initial_state(&self) -> u8 {
            0
        }
        fn enabled(&self, _: u8, _: &LocalInput<'_, u8>) -> Enabled<u8> {
            Enabled::new()
        }
    }

    /// State 1 walks east, state 2 walks west.
    struct Split;

    impl Controller for Split {
        type State = u8;
        fn initial_state(&self) -> u8 {
            0
        }
        fn enabled(&self, s: u8, _: &LocalInput<'_, u8>) -> Enabled<u8> {
            match s {
                1 => smallvec::smallvec![(3, Move::E)],
                2 => smallvec::smallvec![(4, Move::W)],
                _ => smallvec::smallvec![(s, Move::P)],
            }
        }
    }

    #[test]
    fn l1_examples() {
        assert_eq!(l1_distance(Coord::new(0, 0), Coord::new(2, 3)), 5);
        assert_eq!(l1_distance(Coord::new(1, -1), Coord::new(1, -1)), 0);
        assert_eq!(l1_distance(Coord::new(-2, 0), Coord::new(2, 0)), 4);
    }

    #[test]
    fn move_examples() {
        assert_eq!(apply_move(ORIGIN, Move::N), Coord::new(0, 1));
        assert_eq!(apply_move(Coord::new(3, -2), Move::P), Coord::new(3, -2));
        assert_eq!(apply_move(ORIGIN, Move::W), Coord::new(-1, 0));
        assert_eq!(apply_move(ORIGIN, Move::S), Coord::new(0, -1));
        assert_eq!(apply_move(ORIGIN, Move::E), Coord::new(1, 0));
    }

    #[test]
    fn sensing_excludes_self() {
        let alone = Occupants::new(7u8, &[]);
        assert!(alone.input(false, false).sensed_set().is_empty());

        let twins = Occupants::new(7u8, &[7]);
        assert_eq!(twins.input(false, false).sensed_set(), BTreeSet::from([7]));

        let mixed = Occupants::new(1u8, &[2]);
        assert_eq!(mixed.input(false, false).sensed_set(), BTreeSet::from([2]));
    }

    #[test]
    fn restricted_input_hides_states() {
        let cell = Occupants::new(1u8, &[2, 3, 4]);
        let input = cell.input(false, false).restricted(|s| *s % 2 == 0);
        assert_eq!(input.sensed_set(), BTreeSet::from([2, 4]));
    }

    #[test]
    fn world_sense_and_local_input() {
        let agents = vec![
            Agent { id: 0, state: 5u8, pos: ORIGIN },
            Agent { id: 1, state: 6, pos: Coord::new(5, 2) },
            Agent { id: 2, state: 7, pos: Coord::new(1, 0) },
            Agent { id: 3, state: 8, pos: ORIGIN },
        ];
        let w = World::from_agents(0, agents, Some(Coord::new(5, 2))).unwrap();
        assert!(w.local_input(0).unwrap().at_origin);
        assert_eq!(w.sense(0).unwrap(), BTreeSet::from([8]));
        assert!(w.local_input(1).unwrap().at_treasure);
        let far = w.local_input(2).unwrap();
        assert!(!far.at_origin && !far.at_treasure && far.sensed.is_empty());
        assert_eq!(w.sense(9), Err(EngineError::UnknownAgent(9)));
    }

    #[test]
    fn init_world_examples() {
        let w = World::new(5, 0u8, None).unwrap();
        assert_eq!(w.len(), 5);
        assert_eq!(w.round(), 0);
        assert!(w.agents().iter().all(|a| a.pos == ORIGIN));

        let w = World::new(1, 0u8, Some(ORIGIN)).unwrap();
        assert!(w.local_input(0).unwrap().at_treasure);

        let w = World::new(100, 0u8, None).unwrap();
        let index = w.cell_index();
        assert_eq!(index.len(), 1);
        assert_eq!(index[&ORIGIN].len(), 100);

        assert_eq!(World::new(0, 0u8, None), Err(EngineError::NoAgents));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let a = Agent { id: 4, state: 0u8, pos: ORIGIN };
        assert_eq!(
            World::from_agents(0, vec![a, a], None),
            Err(EngineError::DuplicateAgent(4))
        );
    }

    #[test]
    fn deterministic_singleton_steps() {
        let mut w = World::new(1, 0u8, None).unwrap();
        let rng = RngStream::new(0);
        for _ in 0..3 {
            w.advance(&Drift(Move::E), &rng, Exec::Sequential).unwrap();
        }
        assert_eq!(w.agents()[0].pos, Coord::new(3, 0));
        assert_eq!(w.round(), 3);
    }

    #[test]
    fn uniform_choice_frequency() {
        let mut east = 0u32;
        let trials = 10_000u32;
        for seed in 0..trials {
            let mut w = World::new(1, 0u8, None).unwrap();
            w.advance(&Coin, &RngStream::new(u64::from(seed)), Exec::Sequential)
                .unwrap();
            if w.agents()[0].pos == Coord::new(1, 0) {
                east += 1;
            }
        }
        let f = f64::from(east) / f64::from(trials);
        assert!((f - 0.5).abs() <= 0.02, "east frequency {f}");
    }

    #[test]
    fn snapshot_semantics() {
        let agents = vec![
            Agent { id: 0, state: 1u8, pos: ORIGIN },
            Agent { id: 1, state: 2, pos: ORIGIN },
        ];
        let w = World::from_agents(0, agents, None).unwrap();
        // Both agents sense the other's round-0 state even though both move.
        assert_eq!(w.sense(0).unwrap(), BTreeSet::from([2]));
        assert_eq!(w.sense(1).unwrap(), BTreeSet::from([1]));
        let mut next = w.clone();
        next.advance(&Split, &RngStream::new(0), Exec::Sequential)
            .unwrap();
        assert_eq!(next.agent(0).unwrap().pos, Coord::new(1, 0));
        assert_eq!(next.agent(1).unwrap().pos, Coord::new(-1, 0));
        assert!(next.sense(0).unwrap().is_empty());
    }

    #[test]
    fn empty_enabled_set_is_a_protocol_error() {
        let mut w = World::new(2, 0u8, None).unwrap();
        let err = w.advance(&Stuck, &RngStream::new(0), Exec::Sequential).unwrap_err();
        assert!(matches!(err, EngineError::EmptyEnabledSet { round: 0, .. }));
        assert!(err.to_string().contains("state 0"));
    }

    #[test]
    fn run_stop_conditions() {
        let rng = RngStream::new(0);
        let mut w = World::new(3, 0u8, Some(ORIGIN)).unwrap();
        let out = run(&mut w, &Drift(Move::E), &rng, 100, &mut [], Exec::Sequential).unwrap();
        assert_eq!(out.discovery_round, Some(0));

        let mut w = World::new(1, 0u8, Some(Coord::new(4, 0))).unwrap();
        let out = run(&mut w, &Drift(Move::E), &rng, 100, &mut [], Exec::Sequential).unwrap();
        assert_eq!(out.discovery_round, Some(4));

        let mut w = World::new(1, 0u8, None).unwrap();
        let out = run(&mut w, &Drift(Move::E), &rng, 10, &mut [], Exec::Sequential).unwrap();
        assert_eq!(out, RunOutcome { discovery_round: None, rounds: 10 });
    }

    #[test]
    fn permutation_is_a_permutation() {
        let p = permutation(50, 3, 9);
        let mut sorted = p.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..50).collect::<Vec<_>>());
        assert_ne!(p, (0..50).collect::<Vec<_>>());
    }
}
