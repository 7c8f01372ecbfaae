//! Distance between sampled walk lengths and the reference law.

use thiserror::Error;

use crate::geom_search::walk_length_pmf;

pub const MIN_SAMPLES: usize = 100_000;

/// Lengths above this are pooled into one tail bin.
pub const PMF_SUPPORT: u64 = 30;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PmfError {
    #[error("need at least {MIN_SAMPLES} samples, got {0}")]
    TooFewSamples(usize),
}

/// Total-variation distance between the empirical law of `samples` and
/// [`walk_length_pmf`] on `0..=30`, with everything above pooled.
pub fn pmf_test(samples: &[u64]) -> Result<f64, PmfError> {
    if samples.len() < MIN_SAMPLES {
        return Err(PmfError::TooFewSamples(samples.len()));
    }
    let bins = PMF_SUPPORT as usize + 2;
    let mut counts = vec![0u64; bins];
    for &k in samples {
        counts[(k.min(PMF_SUPPORT + 1)) as usize] += 1;
    }
    let total = samples.len() as f64;
    let head: f64 = (0..=PMF_SUPPORT).map(walk_length_pmf).sum();
    let reference = (0..=PMF_SUPPORT)
        .map(walk_length_pmf)
        .chain(std::iter::once((1.0 - head).max(0.0)));
    let tv = counts
        .iter()
        .zip(reference)
        .map(|(&c, p)| (c as f64 / total - p).abs())
        .sum::<f64>()
        / 2.0;
    Ok(tv)
}
