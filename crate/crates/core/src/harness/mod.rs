//! Experiment driver: configuration, placement, recorders, invariant
//! checks, batch runs and reports.

pub mod batch;
pub mod config;
pub mod experiment;
pub mod invariants;
pub mod metrics;
pub mod placement;
pub mod pmf;
pub mod scaling;
pub mod trace;

use thiserror::Error;

pub use batch::{batch, write_csv, BatchOutput, Row};
pub use config::{ConfigError, RunConfig, TraceConfig, TreasureSpec};
pub use experiment::{run_experiment, run_experiment_with, run_id};
pub use invariants::{InvariantChecker, Rule, Violation};
pub use metrics::{LevelMetrics, LevelRecorder, RunMetrics};
pub use placement::{diamond_cells, level_cell, place_treasure};
pub use pmf::{pmf_test, PmfError};
pub use scaling::{scaling_report, ScalingReport};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Engine(#[from] crate::engine::EngineError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
