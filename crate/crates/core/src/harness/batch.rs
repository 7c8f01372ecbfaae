//! Independent runs over a grid of configurations and seeds, and the CSV
//! table they produce.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::engine::Exec;
use crate::protocol::Strategy;

use super::config::RunConfig;
use super::experiment::{run_experiment_with, run_id};
use super::metrics::RunMetrics;

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub run_id: String,
    pub seed: u64,
    pub n: usize,
    pub strategy: Strategy,
    #[serde(rename = "D")]
    pub distance: Option<u64>,
    pub treasure_x: Option<i64>,
    pub treasure_y: Option<i64>,
    pub discovery_round: Option<u64>,
    pub rounds_simulated: u64,
    pub t0: Option<u64>,
    pub n_r: Option<u64>,
    pub n_g: Option<u64>,
    pub violations: u64,
}

impl From<&RunMetrics> for Row {
    fn from(m: &RunMetrics) -> Self {
        Row {
            run_id: m.run_id.clone(),
            seed: m.seed,
            n: m.n,
            strategy: m.strategy,
            distance: m.distance,
            treasure_x: m.treasure.map(|c| c.x),
            treasure_y: m.treasure.map(|c| c.y),
            discovery_round: m.discovery_round,
            rounds_simulated: m.rounds_simulated,
            t0: m.levels.t0,
            n_r: m.n_r,
            n_g: m.n_g,
            violations: m.violation_count,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BatchOutput {
    /// Rows in `(config, seed)` order.
    pub rows: Vec<Row>,
    /// `(run id, message)` for runs that failed.
    pub errors: Vec<(String, String)>,
}

/// Run every config under every seed. Per-run trace and metrics paths are
/// ignored; a failed run is reported in `errors` and the rest continue.
pub fn batch(configs: &[RunConfig], seeds: &[u64]) -> BatchOutput {
    let jobs: Vec<RunConfig> = configs
        .iter()
        .flat_map(|c| {
            seeds.iter().map(move |&seed| RunConfig {
                seed,
                trace: None,
                metrics_out: None,
                ..c.clone()
            })
        })
        .collect();
    let run = |cfg: &RunConfig| -> Result<Row, (String, String)> {
        run_experiment_with(cfg, Exec::Sequential, &mut [])
            .map(|m| Row::from(&m))
            .map_err(|e| (run_id(cfg), e.to_string()))
    };
    #[cfg(feature = "parallel")]
    let results: Vec<_> = {
        use rayon::prelude::*;
        jobs.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<_> = jobs.iter().map(run).collect();

    let mut out = BatchOutput::default();
    for r in results {
        match r {
            Ok(row) => out.rows.push(row),
            Err(e) => out.errors.push(e),
        }
    }
    out
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<Row>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::TreasureSpec;

    #[test]
    fn csv_round_trip_and_header() {
        let cfg = RunConfig::new(5, Strategy::RectOracle, Some(TreasureSpec::Explicit { x: 0, y: 2 }), 3, 100);
        let out = batch(&[cfg], &[1, 2]);
        assert_eq!(out.rows.len(), 2);
        let mut buf = Vec::new();
        write_csv(&out.rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "run_id,seed,n,strategy,D,treasure_x,treasure_y,discovery_round,rounds_simulated,t0,n_r,n_g,violations\n"
        ));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), out.rows);
    }

    #[test]
    fn errors_do_not_stop_the_batch() {
        let good = RunConfig::new(5, Strategy::Geom, None, 0, 5);
        let bad = RunConfig::new(3, Strategy::RectPsta, None, 0, 5);
        let out = batch(&[bad, good], &[0, 1, 2]);
        assert_eq!(out.rows.len(), 3);
        assert_eq!(out.errors.len(), 3);
    }
}
