//! `antsim`: run, batch, verify and measure the grid-search strategies.
//!
//! Exit status is 0 on success, 1 when an invariant or statistical check
//! fails and 2 for configuration or usage errors.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use antsim_core::geom_search::sample_walk_lengths;
use antsim_core::harness::batch::read_csv;
use antsim_core::harness::{
    batch, pmf_test, run_experiment, scaling_report, write_csv, HarnessError, Row, RunConfig, RunMetrics,
    TraceConfig, TreasureSpec,
};
use antsim_core::{RngStream, Strategy};

const DEFAULT_MAX_ROUNDS: u64 = 100_000;

#[derive(Parser)]
#[command(name = "antsim", version, about = "Synchronous grid-search simulator for finite-state agents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and print its metrics row.
    Run(RunArgs),
    /// Run a grid of configurations over a range of seeds.
    Batch(BatchArgs),
    /// Run the invariant suite on the rectangle strategies.
    Verify(VerifyArgs),
    /// Compare sampled walk lengths with the exact distribution.
    Dist(DistArgs),
    /// Sweep n and D and report discovery time over the bound.
    Scaling(ScalingArgs),
}

/// Placement flags shared by `run` and `batch`; both define `--distance`.
#[derive(Args, Clone, Default)]
struct TreasureArgs {
    /// Cell index on the level, counterclockwise from (D, 0).
    #[arg(long, requires = "distance")]
    on_level_index: Option<u64>,
    /// Report the slowest cell of the level.
    #[arg(long, requires = "distance", conflicts_with = "on_level_index")]
    worst_of_level: bool,
    /// Place the treasure on a seeded random cell of the level.
    #[arg(long, requires = "distance", conflicts_with_all = ["on_level_index", "worst_of_level"])]
    random_on_level: bool,
    #[arg(long, requires = "treasure_y", conflicts_with = "distance", allow_hyphen_values = true)]
    treasure_x: Option<i64>,
    #[arg(long, requires = "treasure_x", allow_hyphen_values = true)]
    treasure_y: Option<i64>,
}

impl TreasureArgs {
    fn spec_at(&self, distance: Option<u64>) -> anyhow::Result<Option<TreasureSpec>> {
        if let (Some(x), Some(y)) = (self.treasure_x, self.treasure_y) {
            return Ok(Some(TreasureSpec::Explicit { x, y }));
        }
        let Some(distance) = distance else { return Ok(None) };
        Ok(Some(if let Some(index) = self.on_level_index {
            TreasureSpec::OnLevel { distance, index }
        } else if self.worst_of_level {
            TreasureSpec::WorstOfLevel { distance }
        } else if self.random_on_level {
            TreasureSpec::RandomOnLevel { distance }
        } else {
            return Err(anyhow!(
                "--distance needs one of --on-level-index, --worst-of-level or --random-on-level"
            ));
        }))
    }
}

#[derive(Args)]
struct RunArgs {
    /// TOML file with the fields of a run configuration.
    #[arg(long, conflicts_with_all = ["n", "strategy", "distance", "treasure_x"])]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    strategy: Option<Strategy>,
    /// Treasure level (L1 distance from the origin).
    #[arg(long)]
    distance: Option<u64>,
    #[command(flatten)]
    treasure: TreasureArgs,
    /// Overrides the seed in a config file.
    #[arg(long, env = "ANTSIM_SEED")]
    seed: Option<u64>,
    #[arg(long)]
    max_rounds: Option<u64>,
    /// Write a JSON-lines trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, default_value_t = 1, requires = "trace")]
    trace_stride: u64,
    /// Write the metrics row as CSV here instead of stdout.
    #[arg(long)]
    metrics_out: Option<PathBuf>,
    /// Skip the online invariant checks.
    #[arg(long)]
    no_assert: bool,
}

#[derive(Args)]
struct BatchArgs {
    /// TOML file with a `[[config]]` table per configuration.
    #[arg(long, conflicts_with_all = ["n", "strategy"])]
    grid: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    strategy: Vec<Strategy>,
    /// Levels to place the treasure on (with a placement flag).
    #[arg(long, value_delimiter = ',')]
    distance: Vec<u64>,
    #[command(flatten)]
    treasure: TreasureArgs,
    /// Number of seeds per configuration.
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    #[arg(long, env = "ANTSIM_SEED", default_value_t = 0)]
    seed_start: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
    max_rounds: u64,
    #[arg(long)]
    no_assert: bool,
    /// CSV output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 50)]
    seeds: u64,
    #[arg(long, default_value_t = 400)]
    rounds: u64,
    #[arg(long, value_delimiter = ',', default_values_t = [5, 20, 100])]
    n: Vec<usize>,
}

#[derive(Args)]
struct DistArgs {
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, env = "ANTSIM_SEED", default_value_t = 0)]
    seed: u64,
    /// Largest accepted total-variation distance.
    #[arg(long, default_value_t = 0.01)]
    max_tv: f64,
}

#[derive(Args)]
struct ScalingArgs {
    /// Report on rows from an earlier batch instead of sweeping.
    #[arg(long, conflicts_with_all = ["n", "distance", "out"])]
    rows: Option<PathBuf>,
    #[arg(long, default_value_t = Strategy::RectOracle)]
    strategy: Strategy,
    #[arg(long, value_delimiter = ',', default_values_t = [50, 200, 1000])]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [20, 50, 100, 200])]
    distance: Vec<u64>,
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    #[arg(long, env = "ANTSIM_SEED", default_value_t = 0)]
    seed_start: u64,
    #[arg(long, default_value_t = 1_000_000)]
    max_rounds: u64,
    /// Fail when max/min of the median ratios within any n exceeds this.
    #[arg(long)]
    max_spread: Option<f64>,
    /// Also write the sweep rows as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Grid {
    config: Vec<RunConfig>,
}

/// How a subcommand failed.
enum Failure {
    Config(anyhow::Error),
    Check(anyhow::Error),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(_) | HarnessError::Io(_) => Failure::Config(e.into()),
            _ => Failure::Check(e.into()),
        }
    }
}

fn config_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Config(e.into())
}

fn io_err(e: io::Error) -> Failure {
    Failure::Config(e.into())
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .with_context(|| format!("cannot create {}", path.display()))
        .map_err(Failure::Config)
}

fn emit_rows(rows: &[Row], out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => {
            let mut w = create(path)?;
            write_csv(rows, &mut w).map_err(config_err)?;
            w.flush().map_err(io_err)
        }
        None => write_csv(rows, io::stdout().lock()).map_err(config_err),
    }
}

fn summary(m: &RunMetrics) -> String {
    let found = match (m.discovery_round, m.treasure) {
        (Some(t), Some(c)) => format!("treasure ({}, {}) found at round {t}", c.x, c.y),
        (Some(t), None) => format!("treasure found at round {t}"),
        (None, _) if m.distance.is_some() => "treasure not found".to_string(),
        (None, _) => "no treasure".to_string(),
    };
    let mut s = format!(
        "{}: {found}; {} rounds, {} levels swept, {} teams emitted, {} violations",
        m.run_id,
        m.rounds_simulated,
        m.levels.finishes.len(),
        m.levels.emissions.len(),
        m.violation_count
    );
    if let (Some(r), Some(g)) = (m.n_r, m.n_g) {
        s.push_str(&format!(", branches {r}/{g}"));
    }
    s
}

fn run(args: RunArgs) -> Result<(), Failure> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))
                .map_err(Failure::Config)?;
            RunConfig::from_toml(&text).map_err(config_err)?
        }
        None => {
            let n = args.n.ok_or_else(|| config_err(anyhow!("--n is required without --config")))?;
            let strategy = args
                .strategy
                .ok_or_else(|| config_err(anyhow!("--strategy is required without --config")))?;
            let treasure = args.treasure.spec_at(args.distance).map_err(Failure::Config)?;
            RunConfig::new(n, strategy, treasure, 0, DEFAULT_MAX_ROUNDS)
        }
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(r) = args.max_rounds {
        cfg.max_rounds = r;
    }
    if let Some(path) = args.trace {
        cfg.trace = Some(TraceConfig {
            path,
            stride: args.trace_stride,
        });
    }
    if args.metrics_out.is_some() {
        cfg.metrics_out = args.metrics_out;
    }
    if args.no_assert {
        cfg.assert_invariants = false;
    }

    let m = run_experiment(&cfg)?;
    eprintln!("{}", summary(&m));
    for v in m.violations.iter().take(10) {
        eprintln!("  {v}");
    }
    emit_rows(&[Row::from(&m)], cfg.metrics_out.as_deref())?;
    if m.violation_count > 0 {
        return Err(Failure::Check(anyhow!("{} invariant violations", m.violation_count)));
    }
    Ok(())
}

fn run_batch(args: BatchArgs) -> Result<(), Failure> {
    let configs = match &args.grid {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))
                .map_err(Failure::Config)?;
            let grid: Grid = toml::from_str(&text).map_err(config_err)?;
            for c in &grid.config {
                c.validate().map_err(config_err)?;
            }
            grid.config
        }
        None => {
            if args.n.is_empty() || args.strategy.is_empty() {
                return Err(config_err(anyhow!("give --grid, or both --n and --strategy")));
            }
            let distances: Vec<Option<u64>> = if args.distance.is_empty() {
                vec![None]
            } else {
                args.distance.iter().copied().map(Some).collect()
            };
            let mut configs = Vec::new();
            for &strategy in &args.strategy {
                for &n in &args.n {
                    for &d in &distances {
                        let treasure = args.treasure.spec_at(d).map_err(Failure::Config)?;
                        let mut cfg = RunConfig::new(n, strategy, treasure, 0, args.max_rounds);
                        cfg.assert_invariants = !args.no_assert;
                        cfg.validate().map_err(config_err)?;
                        configs.push(cfg);
                    }
                }
            }
            configs
        }
    };
    let seeds: Vec<u64> = (args.seed_start..args.seed_start + args.seeds).collect();
    let out = batch(&configs, &seeds);
    emit_rows(&out.rows, args.out.as_deref())?;
    for (id, e) in &out.errors {
        eprintln!("{id}: {e}");
    }
    let bad = out.rows.iter().filter(|r| r.violations > 0).count();
    eprintln!(
        "{} runs, {} failed to run, {} with violations",
        out.rows.len() + out.errors.len(),
        out.errors.len(),
        bad
    );
    if !out.errors.is_empty() || bad > 0 {
        return Err(Failure::Check(anyhow!("batch had failing runs")));
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> Result<(), Failure> {
    let mut configs = Vec::new();
    for strategy in [Strategy::RectOracle, Strategy::RectPsta] {
        for &n in &args.n {
            let cfg = RunConfig::new(n, strategy, None, 0, args.rounds);
            cfg.validate().map_err(config_err)?;
            configs.push(cfg);
        }
    }
    let seeds: Vec<u64> = (0..args.seeds).collect();
    let out = batch(&configs, &seeds);
    let mut failing = None;
    for cfg in &configs {
        let rows: Vec<&Row> = out
            .rows
            .iter()
            .filter(|r| r.strategy == cfg.strategy && r.n == cfg.n)
            .collect();
        let violations: u64 = rows.iter().map(|r| r.violations).sum();
        println!(
            "{:<12} n={:<5} {} runs x {} rounds: {} violations",
            cfg.strategy.as_str(),
            cfg.n,
            rows.len(),
            args.rounds,
            violations
        );
        if failing.is_none() {
            failing = rows.iter().find(|r| r.violations > 0).map(|r| RunConfig { seed: r.seed, ..cfg.clone() });
        }
    }
    for (id, e) in &out.errors {
        println!("{id}: {e}");
    }
    if let Some(cfg) = failing {
        let m = run_experiment(&cfg)?;
        println!("first failing run {}:", m.run_id);
        for v in m.violations.iter().take(10) {
            println!("  {v}");
        }
    } else if out.errors.is_empty() {
        println!("invariant suite clean");
        return Ok(());
    }
    Err(Failure::Check(anyhow!("invariant suite failed")))
}

fn dist(args: DistArgs) -> Result<(), Failure> {
    let samples = sample_walk_lengths(&RngStream::new(args.seed), args.samples);
    let tv = pmf_test(&samples).map_err(config_err)?;
    println!("{} walk lengths, seed {}: total variation {tv:.5} (limit {})", args.samples, args.seed, args.max_tv);
    if tv > args.max_tv {
        return Err(Failure::Check(anyhow!("total variation {tv:.5} above {}", args.max_tv)));
    }
    Ok(())
}

fn scaling(args: ScalingArgs) -> Result<(), Failure> {
    let rows = match &args.rows {
        Some(path) => {
            let file = File::open(path)
                .with_context(|| format!("cannot open {}", path.display()))
                .map_err(Failure::Config)?;
            read_csv(file).map_err(config_err)?
        }
        None => {
            let mut configs = Vec::new();
            for &n in &args.n {
                for &d in &args.distance {
                    let treasure = Some(TreasureSpec::WorstOfLevel { distance: d });
                    let mut cfg = RunConfig::new(n, args.strategy, treasure, 0, args.max_rounds);
                    cfg.assert_invariants = false;
                    cfg.validate().map_err(config_err)?;
                    configs.push(cfg);
                }
            }
            let seeds: Vec<u64> = (args.seed_start..args.seed_start + args.seeds).collect();
            let out = batch(&configs, &seeds);
            if let Some((id, e)) = out.errors.first() {
                return Err(Failure::Check(anyhow!("{id}: {e}")));
            }
            if let Some(path) = &args.out {
                emit_rows(&out.rows, Some(path))?;
            }
            out.rows
        }
    };
    let report = scaling_report(&rows);
    println!("{report}");
    if let Some(limit) = args.max_spread {
        if let Some((n, lo, hi)) = report.per_n().into_iter().find(|&(_, lo, hi)| hi / lo > limit) {
            return Err(Failure::Check(anyhow!("n={n}: max/min {:.3} above {limit}", hi / lo)));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Batch(a) => run_batch(a),
        Command::Verify(a) => verify(a),
        Command::Dist(a) => dist(a),
        Command::Scaling(a) => scaling(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
