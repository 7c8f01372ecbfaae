//! Discovery time normalised by the run-time bound.

use std::collections::BTreeMap;
use std::fmt;

use crate::protocol::Strategy;

use super::batch::Row;

/// The bound a strategy is measured against: `D + D^2/n`, plus `log2 n` for
/// elected emission.
pub fn bound(strategy: Strategy, n: usize, d: u64) -> f64 {
    let (n, d) = (n as f64, d as f64);
    let base = d + d * d / n;
    match strategy {
        Strategy::RectPsta => base + n.log2(),
        _ => base,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingEntry {
    pub strategy: Strategy,
    pub n: usize,
    pub distance: u64,
    pub runs: usize,
    /// Median of `discovery / bound` over seeds.
    pub median_ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingReport {
    pub entries: Vec<ScalingEntry>,
    /// Least-squares `c` in `discovery ≈ c * bound` over all rows.
    pub fitted: f64,
    /// Rows without a discovery or with `D = 0`.
    pub skipped: usize,
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

impl ScalingReport {
    /// `(n, min, max)` of the median ratios across distances.
    pub fn per_n(&self) -> Vec<(usize, f64, f64)> {
        let mut by_n: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
        for e in &self.entries {
            let slot = by_n.entry(e.n).or_insert((f64::INFINITY, f64::NEG_INFINITY));
            slot.0 = slot.0.min(e.median_ratio);
            slot.1 = slot.1.max(e.median_ratio);
        }
        by_n.into_iter().map(|(n, (lo, hi))| (n, lo, hi)).collect()
    }

    /// Max over min of all median ratios.
    pub fn spread(&self) -> f64 {
        let lo = self.entries.iter().map(|e| e.median_ratio).fold(f64::INFINITY, f64::min);
        let hi = self.entries.iter().map(|e| e.median_ratio).fold(0.0, f64::max);
        hi / lo
    }

    pub fn ratio(&self, n: usize, distance: u64) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.n == n && e.distance == distance)
            .map(|e| e.median_ratio)
    }
}

pub fn scaling_report(rows: &[Row]) -> ScalingReport {
    let mut groups: BTreeMap<(Strategy, usize, u64), Vec<f64>> = BTreeMap::new();
    let (mut num, mut den, mut skipped) = (0.0, 0.0, 0);
    for row in rows {
        let (Some(d), Some(t)) = (row.distance, row.discovery_round) else {
            skipped += 1;
            continue;
        };
        if d == 0 {
            skipped += 1;
            continue;
        }
        let b = bound(row.strategy, row.n, d);
        num += t as f64 * b;
        den += b * b;
        groups
            .entry((row.strategy, row.n, d))
            .or_default()
            .push(t as f64 / b);
    }
    let entries = groups
        .into_iter()
        .map(|((strategy, n, distance), mut ratios)| ScalingEntry {
            strategy,
            n,
            distance,
            runs: ratios.len(),
            median_ratio: median(&mut ratios),
        })
        .collect();
    ScalingReport {
        entries,
        fitted: if den > 0.0 { num / den } else { f64::NAN },
        skipped,
    }
}

impl fmt::Display for ScalingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<12} {:>6} {:>6} {:>5} {:>10}", "strategy", "n", "D", "runs", "ratio")?;
        for e in &self.entries {
            writeln!(
                f,
                "{:<12} {:>6} {:>6} {:>5} {:>10.3}",
                e.strategy.as_str(),
                e.n,
                e.distance,
                e.runs,
                e.median_ratio
            )?;
        }
        for (n, lo, hi) in self.per_n() {
            writeln!(f, "n={n}: min {lo:.3} max {hi:.3} max/min {:.3}", hi / lo)?;
        }
        write!(f, "fitted c = {:.3}, skipped rows = {}", self.fitted, self.skipped)
    }
}
