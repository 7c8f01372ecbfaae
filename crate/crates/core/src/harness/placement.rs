//! Treasure placement and level geometry.

use crate::engine::{AgentId, Coord, ORIGIN};
use crate::rng::RngStream;

use super::config::TreasureSpec;

/// Number of cells at distance `d` (the origin alone for `d = 0`).
pub fn level_size(d: u64) -> u64 {
    (4 * d).max(1)
}

/// The `index`-th cell of level `d`, counterclockwise from `(d, 0)`.
pub fn level_cell(d: u64, index: u64) -> Option<Coord> {
    if index >= level_size(d) {
        return None;
    }
    if d == 0 {
        return Some(ORIGIN);
    }
    let (d, i) = (d as i64, (index % d) as i64);
    Some(match index / d as u64 {
        0 => Coord::new(d - i, i),
        1 => Coord::new(-i, d - i),
        2 => Coord::new(-d + i, -i),
        _ => Coord::new(i, -d + i),
    })
}

/// All cells at distance `d`, in [`level_cell`] order.
pub fn diamond_cells(d: u64) -> Vec<Coord> {
    (0..level_size(d)).filter_map(|i| level_cell(d, i)).collect()
}

/// Treasure cell for a run. `WorstOfLevel` has no single cell and yields
/// `None`; the experiment tracks the whole level instead.
pub fn place_treasure(spec: &TreasureSpec, rng: &RngStream) -> Option<Coord> {
    match *spec {
        TreasureSpec::Explicit { x, y } => Some(Coord::new(x, y)),
        TreasureSpec::OnLevel { distance, index } => level_cell(distance, index),
        TreasureSpec::WorstOfLevel { .. } => None,
        TreasureSpec::RandomOnLevel { distance } => {
            let size = level_size(distance) as usize;
            // Key reserved for the harness; agent ids never reach it.
            let index = rng.choose(size, AgentId::MAX - 1, u64::MAX, 0);
            level_cell(distance, index as u64)
        }
    }
}
