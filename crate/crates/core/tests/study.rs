use std::path::Path;
use std::process::Command;

use ballbridge::study::{
    bootstrap_rmse, emit_plot_script, log_spaced_sizes, plot_script, run_study, ConvergenceRow,
    ConvergenceTable, Example, Method, StudyConfig, Timing, CSV_HEADER,
};
use ballbridge::{BallDomain, Error};

fn quick_config(example: Example, out: &Path) -> StudyConfig {
    let mut c = StudyConfig::new(example, BallDomain::unit(2).unwrap(), out);
    c.samples = 2_000;
    c.boot_groups = 500;
    c.methods = vec![Method::Bridge, Method::EulerMaruyama { dt: 0.01 }];
    c.seed = 9;
    c
}

#[test]
fn bootstrap_of_exact_samples_has_zero_error() {
    let samples = vec![0.25; 500];
    let points = bootstrap_rmse(&samples, &[1, 10, 500], 200, 0.25, 1, 2).unwrap();
    assert!(points
        .iter()
        .all(|p| p.rmse == 0.0 && p.mean_estimate == 0.25));
}

#[test]
fn bootstrap_of_fair_coin_matches_binomial_error() {
    let samples: Vec<f64> = (0..100_000).map(|i| (i % 2) as f64).collect();
    let p = bootstrap_rmse(&samples, &[100], 10_000, 0.5, 4, 1).unwrap()[0];
    assert!((p.rmse - 0.05).abs() < 0.15 * 0.05, "{}", p.rmse);
}

#[test]
fn bootstrap_rejects_bad_inputs() {
    assert!(matches!(
        bootstrap_rmse(&[], &[1], 10, 0.0, 0, 1),
        Err(Error::Config(_))
    ));
    assert!(bootstrap_rmse(&[1.0, 2.0], &[3], 10, 0.0, 0, 1).is_err());
    assert!(bootstrap_rmse(&[1.0, 2.0], &[0], 10, 0.0, 0, 1).is_err());
    assert!(bootstrap_rmse(&[1.0, 2.0], &[1], 0, 0.0, 0, 1).is_err());
}

#[test]
fn bootstrap_is_independent_of_worker_count() {
    let samples: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 / 101.0).collect();
    let sizes = log_spaced_sizes(10, 1000, 6);
    let a = bootstrap_rmse(&samples, &sizes, 300, 0.5, 7, 1).unwrap();
    let b = bootstrap_rmse(&samples, &sizes, 300, 0.5, 7, 4).unwrap();
    assert_eq!(a, b);
}

#[test]
fn log_spaced_sizes_span_the_range() {
    let s = log_spaced_sizes(10, 10_000, 10);
    assert_eq!(s.len(), 10);
    assert_eq!((s[0], s[9]), (10, 10_000));
    assert!(s.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn csv_round_trip_is_exact() {
    let table = ConvergenceTable {
        rows: vec![
            ConvergenceRow {
                method: Method::Bridge,
                group_size: 10,
                rmse: 0.1 + 0.2,
                mean_estimate: 1.0 / 3.0,
                wall_seconds: 1.2345678901234567e-7,
            },
            ConvergenceRow {
                method: Method::EulerMaruyama { dt: 1e-4 },
                group_size: 100,
                rmse: std::f64::consts::PI * 1e-300,
                mean_estimate: -0.0957,
                wall_seconds: 0.0,
            },
        ],
    };
    let text = table.to_csv();
    assert!(text.starts_with(&format!("{CSV_HEADER}\n")));
    assert!(text.lines().nth(1).unwrap().starts_with("bridge,,10,"));
    assert!(!text.contains('\r'));
    assert_eq!(ConvergenceTable::from_csv(&text).unwrap(), table);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    table.write_csv(&path).unwrap();
    assert_eq!(ConvergenceTable::read_csv(&path).unwrap(), table);
    assert!(ConvergenceTable::from_csv("nonsense\n1,2").is_err());
}

#[test]
fn study_csv_is_deterministic_without_timing() {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for (i, workers) in [1, 1, 2].into_iter().enumerate() {
        let out = dir.path().join(format!("run{i}.csv"));
        let mut c = quick_config(Example::PolyExp, &out);
        c.workers = workers;
        c.timing = Timing::None;
        run_study(&c).unwrap();
        bytes.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
    assert_eq!(bytes[0], bytes[2]);
}

#[test]
fn study_table_shape_and_wall_times() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("unit.csv");
    let mut c = quick_config(Example::Unit, &out);
    c.group_sizes = Some(vec![10, 50, 200, 1000]);
    let result = run_study(&c).unwrap();
    assert_eq!(result.truth, 0.5);
    assert_eq!(result.table.rows.len(), 8);
    assert_eq!(result.table.methods(), c.methods);
    for m in &c.methods {
        let rows: Vec<_> = result.table.rows_for(*m).collect();
        assert!(rows.windows(2).all(|w| w[0].group_size < w[1].group_size));
        assert!(rows
            .windows(2)
            .all(|w| w[0].wall_seconds <= w[1].wall_seconds));
        assert!(rows.iter().all(|r| r.rmse >= 0.0));
    }
    let bridge: Vec<_> = result.table.rows_for(Method::Bridge).collect();
    assert!(bridge[3].rmse < bridge[0].rmse);
    assert_eq!(ConvergenceTable::read_csv(&out).unwrap(), result.table);
}

#[test]
fn bridge_beats_the_coarse_step_floor() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = quick_config(Example::Unit, &dir.path().join("floor.csv"));
    c.samples = 20_000;
    c.methods = vec![Method::Bridge, Method::EulerMaruyama { dt: 0.1 }];
    let result = run_study(&c).unwrap();
    let last = |m| result.table.rows_for(m).last().unwrap().rmse;
    assert!(last(Method::Bridge) < last(Method::EulerMaruyama { dt: 0.1 }));
}

#[test]
fn custom_expression_agrees_between_methods() {
    // For g = x1² on the unit disk, E ∫ X1² dt = E ∫ |X|²/2 dt = 1/16, since
    // v = (1 − r⁴)/8 solves ½Δv = −r² with v = 0 on the circle.
    let dir = tempfile::tempdir().unwrap();
    let mut c = quick_config(Example::Custom("x1^2".into()), &dir.path().join("x1.csv"));
    c.samples = 10_000;
    c.methods = vec![Method::Bridge, Method::EulerMaruyama { dt: 1e-4 }];
    c.truth = Some(0.0625);
    let result = run_study(&c).unwrap();
    let (b, e) = (&result.runs[0].report, &result.runs[1].report);
    let se = b.std_error.hypot(e.std_error);
    assert!(
        (b.mean - e.mean).abs() < 4.0 * se,
        "{} vs {} (se {se})",
        b.mean,
        e.mean
    );
    assert!(
        (b.mean - 0.0625).abs() < 4.0 * b.std_error,
        "{} ± {}",
        b.mean,
        b.std_error
    );
}

#[test]
fn study_configuration_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let mut c = quick_config(Example::Custom("x1^2".into()), &out);
    assert!(
        matches!(run_study(&c), Err(Error::Config(_))),
        "custom example needs a truth"
    );
    c.example = Example::Custom("y^2".into());
    c.truth = Some(1.0);
    assert!(matches!(run_study(&c), Err(Error::Expression { .. })));
    let mut c = quick_config(Example::Unit, &out);
    c.group_sizes = Some(vec![10, 5000]);
    assert!(matches!(run_study(&c), Err(Error::Config(_))));
    c.group_sizes = None;
    c.methods.clear();
    assert!(matches!(run_study(&c), Err(Error::Config(_))));
    let c = quick_config(Example::Unit, &dir.path().join("missing").join("x.csv"));
    assert!(matches!(run_study(&c), Err(Error::Io { .. })));
    assert!(!out.exists());
}

fn table_with(methods: &[Method]) -> ConvergenceTable {
    ConvergenceTable {
        rows: methods
            .iter()
            .map(|&method| ConvergenceRow {
                method,
                group_size: 10,
                rmse: 0.1,
                mean_estimate: 0.5,
                wall_seconds: 0.01,
            })
            .collect(),
    }
}

#[test]
fn plot_script_declares_one_curve_per_method() {
    let two = table_with(&[Method::Bridge, Method::EulerMaruyama { dt: 0.01 }]);
    let script = plot_script(&two, "out.csv").unwrap();
    let curves = script
        .split("CURVES = [")
        .nth(1)
        .unwrap()
        .split(']')
        .next()
        .unwrap();
    assert_eq!(
        curves
            .lines()
            .filter(|l| l.trim_start().starts_with('('))
            .count(),
        2
    );
    assert_eq!(script, plot_script(&two, "out.csv").unwrap());
    assert!(script.contains("loglog"));

    let dir = tempfile::tempdir().unwrap();
    let script_path = dir.path().join("plot.py");
    emit_plot_script(&two, &dir.path().join("out.csv"), &script_path).unwrap();
    let first = std::fs::read(&script_path).unwrap();
    emit_plot_script(&two, &dir.path().join("out.csv"), &script_path).unwrap();
    assert_eq!(first, std::fs::read(&script_path).unwrap());
    assert!(String::from_utf8(first).unwrap().contains("\"out.csv\""));

    let empty_path = dir.path().join("empty.py");
    let r = emit_plot_script(
        &ConvergenceTable::default(),
        &dir.path().join("out.csv"),
        &empty_path,
    );
    assert!(matches!(r, Err(Error::Config(_))));
    assert!(!empty_path.exists());
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ballbridge"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn cli_runs_a_study_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cli.csv");
    let plot = dir.path().join("cli.py");
    let o = cli(&[
        "--example",
        "poly-exp",
        "--method",
        "bridge",
        "--method",
        "em",
        "--dt",
        "0.01",
        "--samples",
        "500",
        "--boot-groups",
        "100",
        "--group-sizes",
        "10,50,500",
        "--workers",
        "1",
        "--timing",
        "none",
        "--out",
        out.to_str().unwrap(),
        "--emit-plot",
        plot.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = ConvergenceTable::read_csv(&out).unwrap();
    assert_eq!(table.rows.len(), 6);
    assert_eq!(
        table.methods(),
        vec![Method::Bridge, Method::EulerMaruyama { dt: 0.01 }]
    );
    assert!(table.rows.iter().all(|r| r.wall_seconds == 0.0));
    assert!(plot.exists());
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.csv");
    let out = out.to_str().unwrap();
    let code = |args: &[&str]| cli(args).status.code().unwrap();
    assert_eq!(
        code(&["--example", "custom", "--samples", "100", "--out", out]),
        2
    );
    assert_eq!(
        code(&[
            "--example",
            "custom",
            "--expr",
            "q+1",
            "--truth",
            "0",
            "--out",
            out
        ]),
        2
    );
    assert_eq!(
        code(&[
            "--method", "em", "--dt", "0.1", "--dt", "0.2", "--method", "em", "--dt", "0.3",
            "--out", out
        ]),
        2
    );
    assert_eq!(code(&["--radius", "-1", "--out", out]), 2);
    let missing = dir.path().join("nope").join("x.csv");
    assert_eq!(
        code(&[
            "--samples",
            "100",
            "--group-sizes",
            "10",
            "--out",
            missing.to_str().unwrap()
        ]),
        4
    );
    assert_eq!(
        code(&[
            "--example",
            "custom",
            "--expr",
            "x1^2 + sin(t)",
            "--truth",
            "0.1",
            "--method",
            "em",
            "--dt",
            "0.05",
            "--samples",
            "200",
            "--group-sizes",
            "10,100",
            "--out",
            out,
        ]),
        0
    );
}
