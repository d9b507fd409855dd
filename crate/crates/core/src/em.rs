//! Killed Euler-Maruyama baseline with trapezoidal path integration.
//!
//! Paths start at the origin and take steps `X_{k+1} = X_k + √dt ξ_k`. A path
//! stops at the first step that lands outside the ball; that step is
//! discarded, so the trapezoid runs over the in-domain nodes
//! `X_0, …, X_M` only and the killing step contributes no partial interval.

use std::time::Instant;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::domain::BallDomain;
use crate::error::{Error, Result};
use crate::estimator::{default_workers, EstimateReport, Integrand};
use crate::parallel::{compensated_sum, map_indexed, purpose, substream};

pub const DEFAULT_STEP_LIMIT: u64 = 1_000_000_000;

#[derive(Debug, Clone)]
pub struct EMConfig {
    pub domain: BallDomain,
    pub dt: f64,
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
    pub integrand: Integrand,
    /// Steps after which a single path is abandoned with an error.
    pub step_limit: u64,
}

impl EMConfig {
    pub fn new(domain: BallDomain, dt: f64, integrand: Integrand) -> Self {
        Self {
            domain,
            dt,
            samples: 100_000,
            seed: 0,
            workers: default_workers(),
            integrand,
            step_limit: DEFAULT_STEP_LIMIT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::config(format!(
                "time step must be positive, got {}",
                self.dt
            )));
        }
        if self.samples == 0 {
            return Err(Error::config("sample count must be at least 1"));
        }
        if self.workers == 0 {
            return Err(Error::config("worker count must be at least 1"));
        }
        Ok(())
    }
}

/// Result of one path: the trapezoidal integral and the number of steps
/// drawn, including the one that left the ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmPath {
    pub value: f64,
    pub steps: u64,
}

pub fn em_sample_path_integral<R: Rng + ?Sized>(config: &EMConfig, rng: &mut R) -> Result<EmPath> {
    let dim = config.domain.dim();
    let r2 = config.domain.radius() * config.domain.radius();
    let sq = config.dt.sqrt();
    let g = &config.integrand;
    let mut x = [0.0f64; 3];
    let first = g.eval(&x[..dim], 0.0);
    let mut last = first;
    let mut sum = first;
    let mut steps: u64 = 0;
    loop {
        if steps >= config.step_limit {
            return Err(Error::StepLimit {
                limit: config.step_limit,
            });
        }
        steps += 1;
        let mut next = x;
        let mut n2 = 0.0;
        for v in next.iter_mut().take(dim) {
            let xi: f64 = rng.sample(StandardNormal);
            *v += sq * xi;
            n2 += *v * *v;
        }
        if n2 >= r2 {
            break;
        }
        x = next;
        last = g.eval(&x[..dim], steps as f64 * config.dt);
        sum += last;
    }
    // steps − 1 retained increments; a single retained node gives zero.
    let value = if steps == 1 {
        0.0
    } else {
        config.dt * (sum - 0.5 * (first + last))
    };
    Ok(EmPath { value, steps })
}

/// Paths in index order.
pub fn em_sample_paths(config: &EMConfig) -> Result<Vec<EmPath>> {
    config.validate()?;
    map_indexed(config.samples, config.workers, |i| {
        let mut rng = substream(config.seed, purpose::EULER_MARUYAMA, i as u64);
        em_sample_path_integral(config, &mut rng)
    })
}

pub fn em_estimate(config: &EMConfig) -> Result<EstimateReport> {
    let start = Instant::now();
    let paths = em_sample_paths(config)?;
    let wall = start.elapsed().as_secs_f64();
    let values: Vec<f64> = paths.iter().map(|p| p.value).collect();
    let mut report = EstimateReport::from_values(&values, config.seed, config.workers, wall);
    report.mean_steps =
        Some(compensated_sum(paths.iter().map(|p| p.steps as f64)) / paths.len() as f64);
    Ok(report)
}
