//! Convergence studies: RMSE of bootstrapped group means against group size
//! and against modelled wall time, for the bridge estimator and the
//! Euler-Maruyama baseline.

mod bootstrap;
pub mod expr;
mod plot;
mod table;

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use crate::domain::{BallDomain, SeriesTruncation};
use crate::em::{em_sample_paths, EMConfig};
use crate::error::{Error, Result};
use crate::estimator::{
    default_workers, BridgeEstimator, EstimateReport, EstimatorConfig, Integrand,
};
use crate::parallel::compensated_sum;

pub use bootstrap::{bootstrap_rmse, log_spaced_sizes, BootstrapPoint};
pub use expr::Expr;
pub use plot::{emit_plot_script, plot_script};
pub use table::{ConvergenceRow, ConvergenceTable, Method, CSV_HEADER};

/// Benchmark value of the `|x|⁴ eᵗ` example on the unit disk.
pub const POLY_EXP_UNIT_DISK: f64 = 0.0957;

#[derive(Debug, Clone, PartialEq)]
pub enum Example {
    /// `g ≡ 1`; the expectation is the mean exit time `R²/n`.
    Unit,
    /// `g = |x|⁴ eᵗ`.
    PolyExp,
    /// A user expression over `x1, x2, x3, t`.
    Custom(String),
}

impl Example {
    pub fn integrand(&self, dim: usize) -> Result<Integrand> {
        Ok(match self {
            Example::Unit => Integrand::constant(1.0),
            Example::PolyExp => Integrand::poly_exp(),
            Example::Custom(src) => {
                let e = Arc::new(Expr::parse(src, dim)?);
                Integrand::new(src.clone(), move |x, t| e.eval(x, t))
            }
        })
    }

    /// Known expectation, where one is available.
    pub fn default_truth(&self, domain: &BallDomain) -> Option<f64> {
        match self {
            Example::Unit => Some(domain.mean_exit_time()),
            Example::PolyExp if domain.dim() == 2 && domain.radius() == 1.0 => {
                Some(POLY_EXP_UNIT_DISK)
            }
            _ => None,
        }
    }
}

/// How per-sample cost enters the wall-time column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Timing {
    Measured,
    /// Wall times are written as zero, making the CSV a pure function of the inputs.
    None,
}

#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub example: Example,
    pub domain: BallDomain,
    pub methods: Vec<Method>,
    pub samples: usize,
    pub boot_groups: usize,
    /// Defaults to 10 log-spaced sizes from 10 to `samples / 10`.
    pub group_sizes: Option<Vec<usize>>,
    pub truth: Option<f64>,
    pub seed: u64,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    pub time_nodes: usize,
    pub truncation: SeriesTruncation,
    pub workers: usize,
    pub timing: Timing,
    pub out: PathBuf,
    pub emit_plot: Option<PathBuf>,
}

impl StudyConfig {
    pub fn new(example: Example, domain: BallDomain, out: impl Into<PathBuf>) -> Self {
        Self {
            example,
            domain,
            methods: vec![Method::Bridge],
            samples: 100_000,
            boot_groups: 10_000,
            group_sizes: None,
            truth: None,
            seed: 0,
            radial_nodes: 10,
            angular_nodes: 20,
            time_nodes: 10,
            truncation: SeriesTruncation::default_for(domain.dim()),
            workers: default_workers(),
            timing: Timing::Measured,
            out: out.into(),
            emit_plot: None,
        }
    }

    pub fn resolved_group_sizes(&self) -> Vec<usize> {
        match &self.group_sizes {
            Some(g) => g.clone(),
            None => log_spaced_sizes(10, self.samples / 10, 10),
        }
    }

    pub fn resolved_truth(&self) -> Result<f64> {
        self.truth
            .or_else(|| self.example.default_truth(&self.domain))
            .ok_or_else(|| Error::config("no known truth for this example; pass one explicitly"))
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::config("at least one method is required"));
        }
        if self.samples == 0 || self.boot_groups == 0 || self.workers == 0 {
            return Err(Error::config(
                "samples, bootstrap groups and workers must be positive",
            ));
        }
        let sizes = self.resolved_group_sizes();
        if sizes.is_empty() || sizes.iter().any(|&m| m == 0 || m > self.samples) {
            return Err(Error::config(format!(
                "group sizes must lie in 1..={}",
                self.samples
            )));
        }
        for m in &self.methods {
            if let Method::EulerMaruyama { dt } = m {
                if !(dt.is_finite() && *dt > 0.0) {
                    return Err(Error::config(format!(
                        "time step must be positive, got {dt}"
                    )));
                }
            }
        }
        self.example.integrand(self.domain.dim())?;
        let truth = self.resolved_truth()?;
        if !truth.is_finite() {
            return Err(Error::config("truth must be finite"));
        }
        Ok(())
    }

    fn estimator_config(&self) -> EstimatorConfig {
        EstimatorConfig {
            domain: self.domain,
            truncation: self.truncation,
            radial_nodes: self.radial_nodes,
            angular_nodes: self.angular_nodes,
            time_nodes: self.time_nodes,
            samples: self.samples,
            seed: self.seed,
            workers: self.workers,
        }
    }
}

/// Sample values of one method and the time it took to produce them.
#[derive(Debug, Clone)]
pub struct MethodRun {
    pub method: Method,
    pub values: Vec<f64>,
    pub report: EstimateReport,
    /// Generation time divided by the sample count (zero with [`Timing::None`]).
    pub seconds_per_sample: f64,
}

#[derive(Debug, Clone)]
pub struct StudyResult {
    pub table: ConvergenceTable,
    pub runs: Vec<MethodRun>,
    pub truth: f64,
}

/// Generates `config.samples` values with `method`.
pub fn run_method(config: &StudyConfig, method: Method, g: &Integrand) -> Result<MethodRun> {
    let start = Instant::now();
    let (values, mut report) = match method {
        Method::Bridge => {
            let est = BridgeEstimator::new(config.estimator_config())?;
            let (report, values) = est.estimate_with_values(g)?;
            (values, report)
        }
        Method::EulerMaruyama { dt } => {
            let mut em = EMConfig::new(config.domain, dt, g.clone());
            em.samples = config.samples;
            em.seed = config.seed;
            em.workers = config.workers;
            let paths = em_sample_paths(&em)?;
            let values: Vec<f64> = paths.iter().map(|p| p.value).collect();
            let mut report = EstimateReport::from_values(&values, config.seed, config.workers, 0.0);
            report.mean_steps =
                Some(compensated_sum(paths.iter().map(|p| p.steps as f64)) / paths.len() as f64);
            (values, report)
        }
    };
    let elapsed = start.elapsed().as_secs_f64();
    report.wall_seconds = elapsed;
    let seconds_per_sample = match config.timing {
        Timing::Measured => elapsed / config.samples as f64,
        Timing::None => 0.0,
    };
    Ok(MethodRun {
        method,
        values,
        report,
        seconds_per_sample,
    })
}

/// Runs every method, bootstraps the RMSE curves and writes the CSV (and the
/// plot script, if requested).
pub fn run_study(config: &StudyConfig) -> Result<StudyResult> {
    config.validate()?;
    for path in std::iter::once(&config.out).chain(config.emit_plot.as_ref()) {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            if !dir.is_dir() {
                return Err(Error::io(
                    path,
                    std::io::Error::new(
                        std::io::ErrorKind::NotFound,
                        "output directory does not exist",
                    ),
                ));
            }
        }
    }
    let truth = config.resolved_truth()?;
    let g = config.example.integrand(config.domain.dim())?;
    let sizes = config.resolved_group_sizes();
    let mut table = ConvergenceTable::default();
    let mut runs = Vec::with_capacity(config.methods.len());
    for &method in &config.methods {
        log::info!("sampling {method} ({} samples)", config.samples);
        let run = run_method(config, method, &g)?;
        let points = bootstrap_rmse(
            &run.values,
            &sizes,
            config.boot_groups,
            truth,
            config.seed,
            config.workers,
        )?;
        for p in points {
            table.rows.push(ConvergenceRow {
                method,
                group_size: p.group_size,
                rmse: p.rmse,
                mean_estimate: p.mean_estimate,
                wall_seconds: run.seconds_per_sample * p.group_size as f64,
            });
        }
        runs.push(run);
    }
    table.write_csv(&config.out)?;
    if let Some(script) = &config.emit_plot {
        emit_plot_script(&table, &config.out, script)?;
    }
    Ok(StudyResult { table, runs, truth })
}

/// RMSE of `method` at wall budget `seconds`, interpolated log-log between
/// table rows; `None` outside the method's wall-time range.
pub fn rmse_at_wall(table: &ConvergenceTable, method: Method, seconds: f64) -> Option<f64> {
    let rows: Vec<&ConvergenceRow> = table.rows_for(method).collect();
    for w in rows.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.wall_seconds <= seconds && seconds <= b.wall_seconds && a.wall_seconds > 0.0 {
            if b.wall_seconds == a.wall_seconds {
                return Some(a.rmse.min(b.rmse));
            }
            let f =
                (seconds.ln() - a.wall_seconds.ln()) / (b.wall_seconds.ln() - a.wall_seconds.ln());
            return Some((a.rmse.ln() + f * (b.rmse.ln() - a.rmse.ln())).exp());
        }
    }
    rows.iter()
        .find(|r| r.wall_seconds == seconds)
        .map(|r| r.rmse)
}
