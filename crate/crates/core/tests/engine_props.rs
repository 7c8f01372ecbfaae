use std::collections::BTreeSet;

use antsim_core::emission::OracleEmission;
use antsim_core::engine::{run, Controller, Exec, Occupants, RoundHook, World};
use antsim_core::protocol::{transition, AgentState, Protocol, Strategy};
use antsim_core::rng::RngStream;
use proptest::prelude::{prop, prop_assert, prop_assert_eq, proptest, ProptestConfig};

fn simulate(strategy: Strategy, n: usize, seed: u64, rounds: u64, exec: Exec) -> World<AgentState> {
    let protocol = Protocol::new(strategy);
    let mut world = World::new(n, protocol.initial_state(), None).unwrap();
    let mut oracle = OracleEmission::new(n);
    let mut hooks: Vec<&mut dyn RoundHook<AgentState>> = Vec::new();
    if strategy == Strategy::RectOracle {
        hooks.push(&mut oracle);
    }
    run(&mut world, &protocol, &RngStream::new(seed), rounds, &mut hooks, exec).unwrap();
    world
}

fn strategy() -> impl proptest::strategy::Strategy<Value = antsim_core::Strategy> {
    prop::sample::select(antsim_core::Strategy::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evaluation_order_is_irrelevant(s in strategy(), n in 5usize..60, seed: u64, perm: u64, rounds in 1u64..120) {
        let reference = simulate(s, n, seed, rounds, Exec::Sequential);
        prop_assert_eq!(&simulate(s, n, seed, rounds, Exec::Permuted(perm)), &reference);
        prop_assert_eq!(&simulate(s, n, seed, rounds, Exec::Parallel), &reference);
    }

    #[test]
    fn every_step_is_an_enabled_transition(s in strategy(), n in 5usize..40, seed: u64, rounds in 1u64..150) {
        let protocol = Protocol::new(s);
        let rng = RngStream::new(seed);
        let mut world = simulate(s, n, seed, rounds, Exec::Sequential);
        let before = world.clone();
        world.advance(&protocol, &rng, Exec::Sequential).unwrap();
        for (a, b) in before.agents().iter().zip(world.agents()) {
            // Brute-force sensing straight from the agent list.
            let others: Vec<AgentState> = before
                .agents()
                .iter()
                .filter(|o| o.id != a.id && o.pos == a.pos)
                .map(|o| o.state)
                .collect();
            let cell = Occupants::new(a.state, &others);
            let input = cell.input(a.pos == antsim_core::engine::ORIGIN, false);
            let enabled = transition(a.state, &input);
            let took = enabled.iter().any(|&(q, m)| q == b.state && a.pos.shifted(m) == b.pos);
            prop_assert!(took, "agent {} from {:?} to {:?} not in {:?}", a.id, a.state, b.state, enabled);
            let sensed: BTreeSet<AgentState> = others.iter().copied().collect();
            prop_assert_eq!(before.sense(a.id).unwrap(), sensed);
        }
    }

    #[test]
    fn repeated_runs_are_identical(s in strategy(), n in 5usize..30, seed: u64) {
        prop_assert_eq!(simulate(s, n, seed, 60, Exec::Parallel), simulate(s, n, seed, 60, Exec::Parallel));
    }
}

#[test]
fn large_world_parallel_matches_sequential() {
    // Above the parallel threshold.
    for s in [antsim_core::Strategy::Hybrid, antsim_core::Strategy::RectPsta] {
        let a = simulate(s, 3000, 5, 40, Exec::Sequential);
        let b = simulate(s, 3000, 5, 40, Exec::Parallel);
        assert_eq!(a, b);
    }
}
