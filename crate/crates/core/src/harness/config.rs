//! Run configuration.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::protocol::Strategy;

/// Where the treasure goes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TreasureSpec {
    Explicit { x: i64, y: i64 },
    /// The `index`-th cell of level `distance`, counterclockwise from `(distance, 0)`.
    OnLevel { distance: u64, index: u64 },
    /// Every cell of the level; the slowest one counts.
    WorstOfLevel { distance: u64 },
    RandomOnLevel { distance: u64 },
}

impl TreasureSpec {
    pub fn distance(&self) -> u64 {
        match *self {
            TreasureSpec::Explicit { x, y } => x.unsigned_abs() + y.unsigned_abs(),
            TreasureSpec::OnLevel { distance, .. }
            | TreasureSpec::WorstOfLevel { distance }
            | TreasureSpec::RandomOnLevel { distance } => distance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceConfig {
    pub path: PathBuf,
    /// Write every `stride`-th round.
    #[serde(default = "one")]
    pub stride: u64,
}

fn one() -> u64 {
    1
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub strategy: Strategy,
    #[serde(default)]
    pub treasure: Option<TreasureSpec>,
    #[serde(default)]
    pub seed: u64,
    pub max_rounds: u64,
    #[serde(default)]
    pub trace: Option<TraceConfig>,
    #[serde(default)]
    pub metrics_out: Option<PathBuf>,
    #[serde(default = "yes")]
    pub assert_invariants: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("n must be at least 1")]
    NoAgents,
    #[error("strategy {strategy} needs at least 5 agents, got {n}")]
    TooFewForTeam { strategy: Strategy, n: usize },
    #[error("level {distance} has {size} cells, index {index} is out of range")]
    LevelIndex { distance: u64, index: u64, size: u64 },
    #[error("trace stride must be positive")]
    TraceStride,
    #[error("treasure coordinate ({x}, {y}) is outside the grid")]
    TreasureRange { x: i64, y: i64 },
    #[error("{0}")]
    Parse(String),
}

impl RunConfig {
    pub fn new(n: usize, strategy: Strategy, treasure: Option<TreasureSpec>, seed: u64, max_rounds: u64) -> Self {
        Self {
            n,
            strategy,
            treasure,
            seed,
            max_rounds,
            trace: None,
            metrics_out: None,
            assert_invariants: true,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n == 0 {
            return Err(ConfigError::NoAgents);
        }
        if self.strategy.is_rect() && self.n < 5 {
            return Err(ConfigError::TooFewForTeam {
                strategy: self.strategy,
                n: self.n,
            });
        }
        match self.treasure {
            Some(TreasureSpec::OnLevel { distance, index }) => {
                let size = super::placement::level_size(distance);
                if index >= size {
                    return Err(ConfigError::LevelIndex { distance, index, size });
                }
            }
            Some(TreasureSpec::Explicit { x, y }) => {
                let limit = crate::engine::COORD_LIMIT;
                if x.abs() >= limit || y.abs() >= limit {
                    return Err(ConfigError::TreasureRange { x, y });
                }
            }
            _ => {}
        }
        if self.trace.as_ref().is_some_and(|t| t.stride == 0) {
            return Err(ConfigError::TraceStride);
        }
        Ok(())
    }
}
