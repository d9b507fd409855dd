use rand::Rng;

use crate::error::{Error, Result};
use crate::parallel::{compensated_sum, map_indexed, purpose, substream};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapPoint {
    pub group_size: usize,
    pub rmse: f64,
    /// Average of the resampled group means.
    pub mean_estimate: f64,
}

/// Bootstrap RMSE of the mean of `m` samples against `truth`, for every `m`
/// in `group_sizes`: `n_boot` groups of size `m` are drawn with replacement
/// and `RMSE = √(mean over groups of (group mean − truth)²)`.
///
/// Each group size draws from its own stream derived from `(seed, m)`.
pub fn bootstrap_rmse(
    samples: &[f64],
    group_sizes: &[usize],
    n_boot: usize,
    truth: f64,
    seed: u64,
    workers: usize,
) -> Result<Vec<BootstrapPoint>> {
    if samples.is_empty() {
        return Err(Error::config("bootstrap needs at least one sample"));
    }
    if n_boot == 0 {
        return Err(Error::config("bootstrap group count must be at least 1"));
    }
    if let Some(&m) = group_sizes.iter().find(|&&m| m == 0 || m > samples.len()) {
        return Err(Error::config(format!(
            "group size {m} must lie in 1..={}",
            samples.len()
        )));
    }
    let n = samples.len();
    map_indexed(group_sizes.len(), workers, |gi| {
        let m = group_sizes[gi];
        let mut rng = substream(seed, purpose::BOOTSTRAP, m as u64);
        let mut sq = Vec::with_capacity(n_boot);
        let mut means = Vec::with_capacity(n_boot);
        for _ in 0..n_boot {
            let s = compensated_sum((0..m).map(|_| samples[rng.random_range(0..n)]));
            let mean = s / m as f64;
            means.push(mean);
            sq.push((mean - truth) * (mean - truth));
        }
        Ok(BootstrapPoint {
            group_size: m,
            rmse: (compensated_sum(sq) / n_boot as f64).sqrt(),
            mean_estimate: compensated_sum(means) / n_boot as f64,
        })
    })
}

/// `count` sizes spaced evenly in log between `lo` and `hi`, rounded and
/// deduplicated.
pub fn log_spaced_sizes(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    let (lo, hi) = (lo.max(1).min(hi.max(1)), hi.max(1));
    if count <= 1 || lo == hi {
        return vec![hi];
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut out: Vec<usize> = (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp().round() as usize)
        .collect();
    out.dedup();
    out
}
