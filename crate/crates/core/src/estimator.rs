//! Monte Carlo bridge estimator of `E[∫_0^T g(X_t, t) dt]` for Brownian motion
//! started at the origin and killed on leaving the ball.
//!
//! Each sample draws an exit time and exit location, then integrates `g`
//! against the killed-bridge density with a fixed spatial rule and a
//! Gauss-Legendre rule scaled to `(0, T)`.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use crate::bridge::{AbsorbedDensityModel, ClampStats, GridKernel};
use crate::domain::{BallDomain, ExitEvent, SeriesTruncation};
use crate::error::{Error, Result};
use crate::exit::{sample_exit_location, ExitLawModel};
use crate::parallel::{map_indexed, mean_and_stderr, purpose, substream};
use crate::quadrature::{spatial_rule, time_rule, QuadratureRule};

type IntegrandFn = dyn Fn(&[f64], f64) -> f64 + Send + Sync;

/// A path integrand `g(x, t)`.
#[derive(Clone)]
pub struct Integrand {
    name: String,
    f: Arc<IntegrandFn>,
}

impl Integrand {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    /// `g ≡ c`.
    pub fn constant(c: f64) -> Self {
        Self::new(format!("{c}"), move |_, _| c)
    }

    /// `g(x, t) = |x|⁴ eᵗ`.
    pub fn poly_exp() -> Self {
        Self::new("|x|^4 exp(t)", |x, t| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            r2 * r2 * t.exp()
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: &[f64], t: f64) -> f64 {
        (self.f)(x, t)
    }

    /// Checks that `g` is finite on every spatial node at `times`.
    pub fn probe(&self, rule: &QuadratureRule, times: &[f64]) -> Result<()> {
        for i in 0..rule.len() {
            for &t in times {
                let v = self.eval(rule.node(i), t);
                if !v.is_finite() {
                    return Err(Error::config(format!(
                        "integrand {} is {v} at x = {:?}, t = {t}",
                        self.name,
                        rule.node(i)
                    )));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Integrand")
            .field("name", &self.name)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub struct EstimatorConfig {
    pub domain: BallDomain,
    pub truncation: SeriesTruncation,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    pub time_nodes: usize,
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
}

impl EstimatorConfig {
    /// 10 radial, 20 angular and 10 time nodes, the default truncation,
    /// 10⁵ samples, seed 0 and one worker per available core.
    pub fn new(domain: BallDomain) -> Self {
        Self {
            domain,
            truncation: SeriesTruncation::default_for(domain.dim()),
            radial_nodes: 10,
            angular_nodes: 20,
            time_nodes: 10,
            samples: 100_000,
            seed: 0,
            workers: default_workers(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::config("sample count must be at least 1"));
        }
        if self.radial_nodes == 0 || self.angular_nodes == 0 || self.time_nodes == 0 {
            return Err(Error::config("quadrature node counts must be at least 1"));
        }
        if self.workers == 0 {
            return Err(Error::config("worker count must be at least 1"));
        }
        Ok(())
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
    pub wall_seconds: f64,
    /// Negative series values set to zero during the run.
    pub clamps: ClampStats,
    /// Samples re-evaluated with doubled truncation.
    pub retries: u64,
    /// Mean Euler-Maruyama step count (baseline only).
    pub mean_steps: Option<f64>,
}

impl EstimateReport {
    pub(crate) fn from_values(
        values: &[f64],
        seed: u64,
        workers: usize,
        wall_seconds: f64,
    ) -> Self {
        let (mean, std_error) = mean_and_stderr(values);
        Self {
            mean,
            std_error,
            samples: values.len(),
            seed,
            workers,
            wall_seconds,
            clamps: ClampStats::default(),
            retries: 0,
            mean_steps: None,
        }
    }
}

/// One sample of the inner integral, evaluating the killed-bridge density
/// directly from `model` at every node (no grid cache).
pub fn single_sample_value(
    g: &Integrand,
    exit: &ExitEvent,
    model: &AbsorbedDensityModel,
    spatial: &QuadratureRule,
    time: &QuadratureRule,
) -> Result<f64> {
    let horizon = exit.time();
    let origin = vec![0.0; model.domain().dim()];
    let mut total = 0.0;
    for j in 0..time.len() {
        let t = horizon * time.node(j)[0];
        let mut inner = 0.0;
        for i in 0..spatial.len() {
            let x = spatial.node(i);
            inner += spatial.weights()[i]
                * g.eval(x, t)
                * model.killed_bridge_density(x, t, &origin, exit)?;
        }
        total += horizon * time.weights()[j] * inner;
    }
    Ok(total)
}

/// The bridge estimator with its exit law, series model and grid caches.
#[derive(Debug)]
pub struct BridgeEstimator {
    config: EstimatorConfig,
    exit_law: ExitLawModel,
    kernel: GridKernel,
    model: AbsorbedDensityModel,
    fallback: OnceLock<Result<(AbsorbedDensityModel, GridKernel)>>,
    time_rule: QuadratureRule,
    retries: AtomicU64,
}

impl BridgeEstimator {
    pub fn new(config: EstimatorConfig) -> Result<Self> {
        config.validate()?;
        let model = AbsorbedDensityModel::new(config.domain, config.truncation)?;
        let rule = spatial_rule(&config.domain, config.radial_nodes, config.angular_nodes)?;
        let kernel = GridKernel::new(&model, &rule)?;
        Ok(Self {
            exit_law: ExitLawModel::new(config.domain)?,
            time_rule: time_rule(1.0, config.time_nodes)?,
            kernel,
            model,
            fallback: OnceLock::new(),
            retries: AtomicU64::new(0),
            config,
        })
    }

    pub fn config(&self) -> &EstimatorConfig {
        &self.config
    }

    pub fn exit_law(&self) -> &ExitLawModel {
        &self.exit_law
    }

    pub fn model(&self) -> &AbsorbedDensityModel {
        &self.model
    }

    pub fn spatial_rule(&self) -> &QuadratureRule {
        self.kernel.rule()
    }

    /// Samples re-evaluated with doubled truncation so far.
    pub fn retries(&self) -> u64 {
        self.retries.load(Ordering::Relaxed)
    }

    /// Time rule on `(0, 1)`; it is scaled to `(0, T)` per sample.
    pub fn unit_time_rule(&self) -> &QuadratureRule {
        &self.time_rule
    }

    /// The exit event of sample `index`.
    pub fn exit_event(&self, index: u64) -> ExitEvent {
        let mut rng = substream(self.config.seed, purpose::BRIDGE, index);
        let time = self.exit_law.sample_exit_time(&mut rng);
        let loc = sample_exit_location(&self.config.domain, &mut rng);
        ExitEvent::new(&self.config.domain, &loc[..self.config.domain.dim()], time)
            .expect("sampled exit events lie on the sphere")
    }

    /// Inner space-time integral for one exit event, retrying once with
    /// doubled truncation if the bridge is degenerate.
    pub fn single_sample_value(&self, g: &Integrand, exit: &ExitEvent) -> Result<f64> {
        match self
            .kernel
            .integrate(exit, &self.time_rule, &|x, t| g.eval(x, t))
        {
            Err(Error::DegenerateBridge(first)) => {
                self.retries.fetch_add(1, Ordering::Relaxed);
                log::debug!("retrying sample with doubled truncation: {first}");
                let (_, kernel) = self
                    .fallback
                    .get_or_init(|| {
                        let model = AbsorbedDensityModel::new(
                            self.config.domain,
                            self.config.truncation.doubled(),
                        )?;
                        let kernel = GridKernel::new(&model, self.kernel.rule())?;
                        Ok((model, kernel))
                    })
                    .as_ref()
                    .map_err(|e| Error::DegenerateBridge(format!("retry setup failed: {e}")))?;
                kernel.integrate(exit, &self.time_rule, &|x, t| g.eval(x, t))
            }
            other => other,
        }
    }

    /// Sample values in index order.
    pub fn sample_values(&self, g: &Integrand) -> Result<Vec<f64>> {
        g.probe(self.kernel.rule(), &[0.0, self.exit_law.t_max()])?;
        map_indexed(self.config.samples, self.config.workers, |i| {
            self.single_sample_value(g, &self.exit_event(i as u64))
        })
    }

    pub fn estimate(&self, g: &Integrand) -> Result<EstimateReport> {
        Ok(self.estimate_with_values(g)?.0)
    }

    /// The report together with the per-sample values it summarizes.
    pub fn estimate_with_values(&self, g: &Integrand) -> Result<(EstimateReport, Vec<f64>)> {
        let before = self.clamp_stats();
        let retries_before = self.retries.load(Ordering::Relaxed);
        let start = Instant::now();
        let values = self.sample_values(g)?;
        let wall = start.elapsed().as_secs_f64();
        let mut report =
            EstimateReport::from_values(&values, self.config.seed, self.config.workers, wall);
        let after = self.clamp_stats();
        report.clamps = ClampStats {
            count: after.count - before.count,
            max_magnitude: after.max_magnitude,
        };
        report.retries = self.retries.load(Ordering::Relaxed) - retries_before;
        Ok((report, values))
    }

    fn clamp_stats(&self) -> ClampStats {
        let mut s = self.model.clamp_stats();
        if let Some(Ok((m, _))) = self.fallback.get() {
            s = s.merge(m.clamp_stats());
        }
        s
    }
}

/// Runs the bridge estimator once.
pub fn estimate(g: &Integrand, config: EstimatorConfig) -> Result<EstimateReport> {
    BridgeEstimator::new(config)?.estimate(g)
}
