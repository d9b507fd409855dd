//! Wall-clock scaling of the bridge estimator. Kept in its own binary so no
//! other test competes for the CPU while it is timed.

use ballbridge::estimator::BridgeEstimator;
use ballbridge::{BallDomain, EstimatorConfig, Integrand};

#[test]
fn cost_grows_linearly_in_the_sample_count() {
    let g = Integrand::poly_exp();
    let wall = |samples: usize| {
        let mut c = EstimatorConfig::new(BallDomain::unit(2).unwrap());
        c.samples = samples;
        c.seed = 3;
        let est = BridgeEstimator::new(c).unwrap();
        est.estimate(&g).unwrap().wall_seconds
    };
    wall(200);
    // 100 × wall(1e3) is taken as the total of 100 separate runs, half before
    // and half after the large one, so both sides span a similar stretch of
    // machine time.
    let mut hundred: f64 = (0..50).map(|_| wall(1_000)).sum();
    let large = wall(100_000);
    hundred += (0..50).map(|_| wall(1_000)).sum::<f64>();
    let ratio = large / hundred;
    assert!(
        (0.8..=1.2).contains(&ratio),
        "{large} s vs {hundred} s for 100 × 1e3"
    );
}
