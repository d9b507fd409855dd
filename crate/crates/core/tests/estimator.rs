use ballbridge::bridge::{AbsorbedDensityModel, GridKernel};
use ballbridge::estimator::{estimate, single_sample_value, BridgeEstimator};
use ballbridge::quadrature::{spatial_rule, time_rule};
use ballbridge::{BallDomain, Error, EstimatorConfig, ExitEvent, Integrand, SeriesTruncation};

fn config(dim: usize, samples: usize, seed: u64) -> EstimatorConfig {
    let mut c = EstimatorConfig::new(BallDomain::unit(dim).unwrap());
    c.samples = samples;
    c.seed = seed;
    c
}

fn direction(dim: usize) -> Vec<f64> {
    [0.48, 0.6, 0.64][..dim].to_vec()
}

#[test]
fn constant_integrand_returns_the_exit_time() {
    // With ten Gauss-Legendre time nodes, the default grid resolves the
    // bridge near t = T well enough for this only once T ≳ 2R².
    for dim in 1..=3 {
        let est = BridgeEstimator::new(config(dim, 1, 0)).unwrap();
        let domain = *est.model().domain();
        for big in [2.0, 3.0] {
            let exit = ExitEvent::from_direction(&domain, &direction(dim), big).unwrap();
            let v = est
                .single_sample_value(&Integrand::constant(1.0), &exit)
                .unwrap();
            assert!((v - big).abs() < 1e-4, "dim {dim}, T {big}: {v}");
        }
    }
}

#[test]
fn constant_integrands_scale_linearly() {
    let est = BridgeEstimator::new(config(2, 1, 0)).unwrap();
    let domain = *est.model().domain();
    for big in [0.3, 2.0] {
        let exit = ExitEvent::from_direction(&domain, &[1.0, 1.0], big).unwrap();
        let one = est
            .single_sample_value(&Integrand::constant(1.0), &exit)
            .unwrap();
        for c in [0.5, 3.0, 250.0] {
            let v = est
                .single_sample_value(&Integrand::constant(c), &exit)
                .unwrap();
            assert!((v - c * one).abs() < 1e-12 * c * one, "{v} vs {c} × {one}");
            if big >= 2.0 {
                assert!((v - c * big).abs() < 1e-4 * c);
            }
        }
    }
}

#[test]
fn cached_and_direct_sample_values_agree() {
    for dim in 1..=3 {
        let est = BridgeEstimator::new(config(dim, 1, 0)).unwrap();
        let g = Integrand::poly_exp();
        for index in 0..3 {
            let exit = est.exit_event(index);
            let cached = est.single_sample_value(&g, &exit).unwrap();
            let direct = single_sample_value(
                &g,
                &exit,
                est.model(),
                est.spatial_rule(),
                est.unit_time_rule(),
            )
            .unwrap();
            assert!(
                (cached - direct).abs() < 1e-11 * direct.abs().max(1e-3),
                "dim {dim}: {cached} vs {direct}"
            );
        }
    }
}

#[test]
fn single_sample_mean_is_the_first_sample() {
    let est = BridgeEstimator::new(config(2, 1, 1234)).unwrap();
    let g = Integrand::poly_exp();
    let report = est.estimate(&g).unwrap();
    let first = est.single_sample_value(&g, &est.exit_event(0)).unwrap();
    assert_eq!(report.mean.to_bits(), first.to_bits());
    assert_eq!(report.samples, 1);
    assert_eq!(report.std_error, 0.0);
    assert_eq!(report.seed, 1234);
}

#[test]
fn estimates_are_bit_identical_across_runs_and_workers() {
    let g = Integrand::poly_exp();
    let mut means = Vec::new();
    for workers in [1, 1, 2, 3] {
        let mut c = config(2, 300, 77);
        c.workers = workers;
        let r = estimate(&g, c).unwrap();
        assert_eq!(r.workers, workers);
        means.push(r.mean.to_bits());
    }
    assert!(means.windows(2).all(|w| w[0] == w[1]));
    let other = estimate(&g, config(2, 300, 78)).unwrap();
    assert_ne!(other.mean.to_bits(), means[0]);
}

#[test]
fn sample_values_of_nonnegative_integrands_are_nonnegative() {
    for dim in 1..=3 {
        let est = BridgeEstimator::new(config(dim, 1000, 5)).unwrap();
        let values = est.sample_values(&Integrand::poly_exp()).unwrap();
        assert_eq!(values.len(), 1000);
        let low = values.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(low >= -1e-6, "dim {dim}: {low}");
    }
}

#[test]
fn exit_time_z_scores_are_standard_normal() {
    // E[∫_0^T 1 dt] = E[T] = R²/n.
    let z: Vec<f64> = (0..20)
        .map(|seed| {
            let r = estimate(&Integrand::constant(1.0), config(2, 10_000, 100 + seed)).unwrap();
            (r.mean - 0.5) / r.std_error
        })
        .collect();
    let mean_z = z.iter().sum::<f64>() / z.len() as f64;
    assert!(mean_z.abs() < 0.75, "mean z {mean_z}: {z:?}");
    assert!(z.iter().all(|v| v.abs() <= 4.0), "{z:?}");
}

#[test]
fn degenerate_bridges_are_retried_with_doubled_truncation() {
    let mut c = config(2, 1, 0);
    c.truncation = SeriesTruncation::new(10, 10, 1e-18).unwrap();
    let est = BridgeEstimator::new(c.clone()).unwrap();
    let domain = *est.model().domain();
    let g = Integrand::constant(1.0);

    // Ten radial terms leave the boundary flux unconverged at T = 0.025;
    // twenty are enough.
    let exit = ExitEvent::from_direction(&domain, &[1.0, 0.0], 0.025).unwrap();
    let v = est.single_sample_value(&g, &exit).unwrap();
    assert_eq!(est.retries(), 1);
    let doubled = AbsorbedDensityModel::new(domain, c.truncation.doubled()).unwrap();
    let rule = spatial_rule(&domain, c.radial_nodes, c.angular_nodes).unwrap();
    let kernel = GridKernel::new(&doubled, &rule).unwrap();
    let want = kernel
        .integrate(&exit, &time_rule(1.0, c.time_nodes).unwrap(), &|_, _| 1.0)
        .unwrap();
    assert_eq!(v.to_bits(), want.to_bits());

    // Still degenerate after the retry.
    let exit = ExitEvent::from_direction(&domain, &[1.0, 0.0], 0.005).unwrap();
    let r = est.single_sample_value(&g, &exit);
    assert!(matches!(r, Err(Error::DegenerateBridge(_))), "{r:?}");
    assert_eq!(est.retries(), 2);
}

#[test]
fn invalid_configurations_are_rejected() {
    let mut c = config(2, 0, 0);
    assert!(matches!(
        BridgeEstimator::new(c.clone()),
        Err(Error::Config(_))
    ));
    c.samples = 10;
    c.workers = 0;
    assert!(BridgeEstimator::new(c.clone()).is_err());
    c.workers = 1;
    c.time_nodes = 0;
    assert!(BridgeEstimator::new(c.clone()).is_err());
    c.time_nodes = 10;
    c.radial_nodes = 0;
    assert!(BridgeEstimator::new(c).is_err());
}

#[test]
fn integrands_that_blow_up_on_the_grid_are_rejected() {
    let est = BridgeEstimator::new(config(2, 10, 0)).unwrap();
    let g = Integrand::new("1/x1", |x: &[f64], _| 1.0 / (x[0] - est_node_x()));
    fn est_node_x() -> f64 {
        let rule = spatial_rule(&BallDomain::unit(2).unwrap(), 10, 20).unwrap();
        rule.node(0)[0]
    }
    assert!(matches!(est.estimate(&g), Err(Error::Config(_))));
}
