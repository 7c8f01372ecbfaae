//! Building and running one experiment.

use std::fs::File;
use std::io::BufWriter;

use crate::emission::OracleEmission;
use crate::engine::{self, Exec, RoundHook, World};
use crate::protocol::{AgentState, Protocol, Strategy};
use crate::rng::RngStream;

use super::config::{RunConfig, TreasureSpec};
use super::invariants::InvariantChecker;
use super::metrics::{BranchCounter, FirstVisit, LevelRecorder, RayRecorder, RunMetrics};
use super::placement::place_treasure;
use super::HarnessError;

/// Stable identifier of a `(config, seed)` pair.
pub fn run_id(cfg: &RunConfig) -> String {
    let treasure = match cfg.treasure {
        None => "none".to_string(),
        Some(TreasureSpec::Explicit { x, y }) => format!("at{x}_{y}"),
        Some(TreasureSpec::OnLevel { distance, index }) => format!("level{distance}i{index}"),
        Some(TreasureSpec::WorstOfLevel { distance }) => format!("worst{distance}"),
        Some(TreasureSpec::RandomOnLevel { distance }) => format!("random{distance}"),
    };
    format!("{}-n{}-{}-s{}", cfg.strategy, cfg.n, treasure, cfg.seed)
}

/// Run with the default (parallel) schedule and no extra observers.
pub fn run_experiment(cfg: &RunConfig) -> Result<RunMetrics, HarnessError> {
    run_experiment_with(cfg, Exec::Parallel, &mut [])
}

/// Run `cfg` under `exec`. `extra` hooks observe every round after the
/// built-in recorders.
pub fn run_experiment_with(
    cfg: &RunConfig,
    exec: Exec,
    extra: &mut [&mut dyn RoundHook<AgentState>],
) -> Result<RunMetrics, HarnessError> {
    cfg.validate()?;
    let rng = RngStream::new(cfg.seed);
    let treasure = cfg.treasure.as_ref().and_then(|t| place_treasure(t, &rng));
    let protocol = Protocol::new(cfg.strategy);
    let mut world = World::new(cfg.n, engine::Controller::initial_state(&protocol), treasure)?;

    let mut oracle = (cfg.strategy == Strategy::RectOracle).then(|| OracleEmission::new(cfg.n));
    let mut levels = LevelRecorder::new();
    let mut checker = cfg.assert_invariants.then(InvariantChecker::new);
    let mut ray = matches!(cfg.strategy, Strategy::RectPsta | Strategy::Hybrid).then(RayRecorder::new);
    let mut branches = (cfg.strategy == Strategy::Hybrid).then(BranchCounter::default);
    let mut visits = match cfg.treasure {
        Some(TreasureSpec::WorstOfLevel { distance }) => Some(FirstVisit::level(distance)),
        _ => None,
    };
    let mut trace = match &cfg.trace {
        Some(t) => Some(super::trace::TraceWriter::new(
            BufWriter::new(File::create(&t.path)?),
            t.stride,
        )),
        None => None,
    };

    let outcome = {
        let mut hooks: Vec<&mut dyn RoundHook<AgentState>> = Vec::new();
        if let Some(h) = oracle.as_mut() {
            hooks.push(h);
        }
        hooks.push(&mut levels);
        if let Some(h) = checker.as_mut() {
            hooks.push(h);
        }
        if let Some(h) = ray.as_mut() {
            hooks.push(h);
        }
        if let Some(h) = branches.as_mut() {
            hooks.push(h);
        }
        if let Some(h) = visits.as_mut() {
            hooks.push(h);
        }
        if let Some(h) = trace.as_mut() {
            hooks.push(h);
        }
        for h in extra.iter_mut() {
            hooks.push(&mut **h);
        }
        engine::run(&mut world, &protocol, &rng, cfg.max_rounds, &mut hooks, exec)?
    };

    if let Some(t) = trace {
        t.finish()?;
    }

    let (discovery_round, treasure) = match &visits {
        Some(v) => match v.worst() {
            Some((cell, round)) => (Some(round), Some(cell)),
            None => (None, None),
        },
        None => (outcome.discovery_round, treasure),
    };
    let (level_metrics, mut log) = levels.finish();
    if let Some(c) = checker {
        log.extend(c.log);
    }
    let (n_r, n_g) = match branches.and_then(|b| b.sizes) {
        Some((r, g)) => (Some(r), Some(g)),
        None => (None, None),
    };
    Ok(RunMetrics {
        run_id: run_id(cfg),
        seed: cfg.seed,
        n: cfg.n,
        strategy: cfg.strategy,
        distance: cfg.treasure.map(|t| t.distance()),
        treasure,
        discovery_round,
        rounds_simulated: outcome.rounds,
        n_r,
        n_g,
        levels: level_metrics,
        ray_ready: ray.map(|r| r.ready).unwrap_or_default(),
        violations: log.stored,
        violation_count: log.total,
    })
}
