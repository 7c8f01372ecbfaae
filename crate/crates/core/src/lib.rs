//! Simulator for collaborative treasure search by finite-state agents on the
//! integer grid.
//!
//! The [`engine`] evaluates synchronous rounds for any [`engine::Controller`].
//! The search protocols live in [`rect_search`], [`emission`],
//! [`geom_search`] and [`hybrid`], glued together by [`protocol`]. The
//! [`harness`] drives experiments, records metrics and checks invariants.

pub mod emission;
pub mod engine;
pub mod geom_search;
pub mod harness;
pub mod hybrid;
pub mod protocol;
pub mod rect_search;
pub mod rng;

pub use engine::{Coord, Exec, Move, World};
pub use protocol::{AgentState, Protocol, Strategy};
pub use rng::RngStream;
