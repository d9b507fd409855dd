use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use ballbridge::study::{run_study, Example, Method, StudyConfig, Timing};
use ballbridge::{BallDomain, Error, Result, SeriesTruncation};

const DEFAULT_STEPS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

/// Convergence studies for path integrals of Brownian motion killed at the
/// boundary of the n-ball: bridge estimator versus Euler-Maruyama.
#[derive(Debug, Parser)]
#[command(name = "ballbridge", version)]
struct Cli {
    #[arg(long, value_enum, default_value_t = ExampleArg::Unit)]
    example: ExampleArg,
    /// Integrand g(x1, x2, x3, t) for `--example custom`.
    #[arg(long)]
    expr: Option<String>,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=3))]
    dimension: u8,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Repeatable; the i-th `em` takes the i-th `--dt`, and a single `em` runs every `--dt`.
    #[arg(long = "method", value_enum)]
    methods: Vec<MethodArg>,
    /// Euler-Maruyama time step (repeatable).
    #[arg(long = "dt")]
    dts: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 10_000)]
    boot_groups: usize,
    /// Comma-separated group sizes (default: 10 log-spaced sizes up to samples/10).
    #[arg(long, value_delimiter = ',')]
    group_sizes: Option<Vec<usize>>,
    #[arg(long)]
    truth: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    radial_nodes: usize,
    #[arg(long, default_value_t = 20)]
    angular_nodes: usize,
    #[arg(long, default_value_t = 10)]
    time_nodes: usize,
    /// Radial and angular series terms (default depends on the dimension).
    #[arg(long)]
    series_terms: Option<usize>,
    /// Worker threads (default: available cores).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value = "convergence.csv")]
    out: PathBuf,
    /// Also write a matplotlib script plotting the CSV.
    #[arg(long)]
    emit_plot: Option<PathBuf>,
    /// `none` writes zero wall times so the CSV depends only on the inputs.
    #[arg(long, value_enum, default_value_t = TimingArg::Measured)]
    timing: TimingArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExampleArg {
    Unit,
    PolyExp,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Bridge,
    Em,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TimingArg {
    Measured,
    None,
}

fn methods(cli: &Cli) -> Result<Vec<Method>> {
    if cli.methods.is_empty() {
        let steps: &[f64] = if cli.dts.is_empty() {
            &DEFAULT_STEPS
        } else {
            &cli.dts
        };
        let mut out = vec![Method::Bridge];
        out.extend(steps.iter().map(|&dt| Method::EulerMaruyama { dt }));
        return Ok(out);
    }
    let em_count = cli.methods.iter().filter(|m| **m == MethodArg::Em).count();
    let expand = em_count == 1 && cli.dts.len() > 1;
    if !expand && em_count != cli.dts.len() {
        return Err(Error::Config(format!(
            "{em_count} `--method em` but {} `--dt` values",
            cli.dts.len()
        )));
    }
    let mut dts = cli.dts.iter();
    let mut out = Vec::new();
    for m in &cli.methods {
        match m {
            MethodArg::Bridge => out.push(Method::Bridge),
            MethodArg::Em if expand => {
                out.extend(cli.dts.iter().map(|&dt| Method::EulerMaruyama { dt }))
            }
            MethodArg::Em => out.push(Method::EulerMaruyama {
                dt: *dts.next().expect("counts checked above"),
            }),
        }
    }
    Ok(out)
}

fn config(cli: &Cli) -> Result<StudyConfig> {
    let domain = BallDomain::new(cli.dimension as usize, cli.radius)?;
    let example = match (cli.example, &cli.expr) {
        (ExampleArg::Custom, Some(e)) => Example::Custom(e.clone()),
        (ExampleArg::Custom, None) => {
            return Err(Error::Config("`--example custom` needs `--expr`".into()))
        }
        (_, Some(_)) => return Err(Error::Config("`--expr` requires `--example custom`".into())),
        (ExampleArg::Unit, None) => Example::Unit,
        (ExampleArg::PolyExp, None) => Example::PolyExp,
    };
    let mut c = StudyConfig::new(example, domain, &cli.out);
    c.methods = methods(cli)?;
    c.samples = cli.samples;
    c.boot_groups = cli.boot_groups;
    c.group_sizes = cli.group_sizes.clone();
    c.truth = cli.truth;
    c.seed = cli.seed;
    c.radial_nodes = cli.radial_nodes;
    c.angular_nodes = cli.angular_nodes;
    c.time_nodes = cli.time_nodes;
    if let Some(n) = cli.series_terms {
        c.truncation = SeriesTruncation::new(n, n, SeriesTruncation::DEFAULT_TAIL_TOLERANCE)
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    if let Some(w) = cli.workers {
        c.workers = w;
    }
    c.timing = match cli.timing {
        TimingArg::Measured => Timing::Measured,
        TimingArg::None => Timing::None,
    };
    c.emit_plot = cli.emit_plot.clone();
    Ok(c)
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = config(cli)?;
    let result = run_study(&cfg)?;
    println!("truth {:.6}", result.truth);
    for r in &result.runs {
        let steps = r
            .report
            .mean_steps
            .map(|s| format!("  mean steps {s:.1}"))
            .unwrap_or_default();
        println!(
            "{:<16} mean {:.6} ± {:.6}  {:.2} s{steps}",
            r.method.to_string(),
            r.report.mean,
            r.report.std_error,
            r.report.wall_seconds
        );
    }
    println!("wrote {}", cfg.out.display());
    if let Some(p) = &cfg.emit_plot {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
