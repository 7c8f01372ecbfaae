//! Counter-based randomness.
//!
//! Every draw is a pure function of `(seed, agent, round, index)`, so the
//! outcome of a round never depends on the order in which agents are
//! evaluated or on how the work is split across threads.

use crate::engine::AgentId;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Keyed pseudorandom function over `(agent, round, index)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RngStream {
    seed: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform 64-bit value for the given key.
    #[inline]
    pub fn draw(&self, agent: AgentId, round: u64, index: u32) -> u64 {
        let mut h = mix(self.seed.wrapping_add(GOLDEN));
        h = mix(h ^ u64::from(agent).wrapping_mul(GOLDEN));
        h = mix(h ^ round.wrapping_mul(0xD6E8_FEB8_6659_FD93));
        mix(h ^ u64::from(index).wrapping_add(GOLDEN))
    }

    /// Uniform index in `0..len` (multiply-high reduction).
    #[inline]
    pub fn choose(&self, len: usize, agent: AgentId, round: u64, index: u32) -> usize {
        debug_assert!(len > 0);
        let x = self.draw(agent, round, index);
        ((u128::from(x) * len as u128) >> 64) as usize
    }

    /// Uniform value in `[0, 1)` with 53 bits of precision.
    pub fn unit(&self, agent: AgentId, round: u64, index: u32) -> f64 {
        (self.draw(agent, round, index) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
