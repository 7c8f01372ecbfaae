//! Line-delimited JSON traces: one object per sampled round.

use std::io::{self, Write};

use serde::Serialize;

use crate::engine::{RoundHook, World};
use crate::protocol::AgentState;

#[derive(Serialize)]
struct AgentRecord {
    id: u32,
    state: &'static str,
    x: i64,
    y: i64,
}

#[derive(Serialize)]
struct RoundRecord {
    round: u64,
    agents: Vec<AgentRecord>,
}

/// Writes `{"round": t, "agents": [{"id", "state", "x", "y"}, ...]}` for every
/// `stride`-th round. The first I/O error is kept and later writes skipped.
pub struct TraceWriter<W: Write> {
    out: W,
    stride: u64,
    error: Option<io::Error>,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(out: W, stride: u64) -> Self {
        Self {
            out,
            stride: stride.max(1),
            error: None,
        }
    }

    fn write_round(&mut self, world: &World<AgentState>) -> io::Result<()> {
        let record = RoundRecord {
            round: world.round(),
            agents: world
                .agents()
                .iter()
                .map(|a| AgentRecord {
                    id: a.id,
                    state: a.state.tag(),
                    x: a.pos.x,
                    y: a.pos.y,
                })
                .collect(),
        };
        serde_json::to_writer(&mut self.out, &record)?;
        self.out.write_all(b"\n")
    }

    /// Flush and hand back the sink.
    pub fn finish(mut self) -> io::Result<W> {
        if let Some(e) = self.error.take() {
            return Err(e);
        }
        self.out.flush()?;
        Ok(self.out)
    }
}

impl<W: Write> RoundHook<AgentState> for TraceWriter<W> {
    fn observe(&mut self, world: &World<AgentState>) {
        if self.error.is_some() || !world.round().is_multiple_of(self.stride) {
            return;
        }
        if let Err(e) = self.write_round(world) {
            self.error = Some(e);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_sampled_rounds() {
        let mut world = World::new(2, AgentState::Idle, None).unwrap();
        let mut trace = TraceWriter::new(Vec::new(), 2);
        let ctl = crate::protocol::Protocol::new(crate::protocol::Strategy::RectOracle);
        let rng = crate::rng::RngStream::new(0);
        for _ in 0..5 {
            trace.observe(&world);
            world.advance(&ctl, &rng, crate::engine::Exec::Sequential).unwrap();
        }
        let text = String::from_utf8(trace.finish().unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(
            lines[0],
            r#"{"round":0,"agents":[{"id":0,"state":"Idle","x":0,"y":0},{"id":1,"state":"Idle","x":0,"y":0}]}"#
        );
        assert!(lines[2].starts_with(r#"{"round":4,"#));
    }
}
