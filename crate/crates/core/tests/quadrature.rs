use std::f64::consts::{E, PI};

use ballbridge::quadrature::{
    ball_rule, disk_rule, interval_rule, spatial_rule, time_rule, QuadratureRule,
};
use ballbridge::BallDomain;
use proptest::prelude::*;

fn double_factorial(n: i64) -> f64 {
    let mut p = 1.0;
    let mut k = n;
    while k > 1 {
        p *= k as f64;
        k -= 2;
    }
    p
}

/// `∫ x^a` over `(−R, R)`.
fn interval_monomial(r: f64, a: u32) -> f64 {
    if a % 2 == 1 {
        0.0
    } else {
        2.0 * r.powi(a as i32 + 1) / (a + 1) as f64
    }
}

/// `∫ x^a y^b` over the disk of radius `R`.
fn disk_monomial(r: f64, a: u32, b: u32) -> f64 {
    if a % 2 == 1 || b % 2 == 1 {
        return 0.0;
    }
    let (a, b) = (a as i64, b as i64);
    let angular =
        2.0 * PI * double_factorial(a - 1) * double_factorial(b - 1) / double_factorial(a + b);
    angular * r.powi((a + b + 2) as i32) / (a + b + 2) as f64
}

/// `∫ x^a y^b z^c` over the ball of radius `R`.
fn ball_monomial(r: f64, a: u32, b: u32, c: u32) -> f64 {
    if a % 2 == 1 || b % 2 == 1 || c % 2 == 1 {
        return 0.0;
    }
    let (a, b, c) = (a as i64, b as i64, c as i64);
    let surface =
        4.0 * PI * double_factorial(a - 1) * double_factorial(b - 1) * double_factorial(c - 1)
            / double_factorial(a + b + c + 1);
    surface * r.powi((a + b + c + 3) as i32) / (a + b + c + 3) as f64
}

fn monomial(x: &[f64], exps: &[u32]) -> f64 {
    x.iter().zip(exps).map(|(v, &e)| v.powi(e as i32)).product()
}

/// Integrates `Σ c_i x^{e_i}` with the rule and against the oracle; returns
/// (rule value, oracle value, scale for the tolerance).
fn compare(
    rule: &QuadratureRule,
    terms: &[(f64, Vec<u32>)],
    oracle: impl Fn(&[u32]) -> f64,
    r: f64,
) -> (f64, f64, f64) {
    let got = rule.integrate(|x| terms.iter().map(|(c, e)| c * monomial(x, e)).sum());
    let want: f64 = terms.iter().map(|(c, e)| c * oracle(e)).sum();
    let scale: f64 = terms
        .iter()
        .map(|(c, e)| c.abs() * r.powi(e.iter().sum::<u32>() as i32))
        .sum::<f64>()
        * rule.weights().iter().sum::<f64>();
    (got, want, scale.max(1.0))
}

/// Random exponent vectors of total degree at most `degree`.
fn random_terms(dim: usize, degree: usize, seeds: &[(f64, u64)]) -> Vec<(f64, Vec<u32>)> {
    seeds
        .iter()
        .map(|&(c, s)| {
            let total = (s % (degree as u64 + 1)) as u32;
            let mut e = vec![0u32; dim];
            let mut left = total;
            let mut h = s / (degree as u64 + 1);
            for slot in e.iter_mut().take(dim - 1) {
                let take = (h % (left as u64 + 1)) as u32;
                *slot = take;
                left -= take;
                h /= 7;
            }
            e[dim - 1] = left;
            (c, e)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn interval_rule_is_exact_to_declared_degree(
        r in 0.5f64..2.0,
        n in 1usize..20,
        seeds in prop::collection::vec((-1.0f64..1.0, any::<u64>()), 1..6),
    ) {
        let rule = interval_rule(r, n).unwrap();
        let terms = random_terms(1, rule.exactness_degree(), &seeds);
        let (got, want, scale) = compare(&rule, &terms, |e| interval_monomial(r, e[0]), r);
        prop_assert!((got - want).abs() <= 1e-12 * scale, "{got} vs {want}");
    }

    #[test]
    fn disk_rule_is_exact_to_declared_degree(
        r in 0.5f64..2.0,
        nr in 1usize..10,
        na in 1usize..24,
        seeds in prop::collection::vec((-1.0f64..1.0, any::<u64>()), 1..6),
    ) {
        let rule = disk_rule(r, nr, na).unwrap();
        let terms = random_terms(2, rule.exactness_degree(), &seeds);
        let (got, want, scale) = compare(&rule, &terms, |e| disk_monomial(r, e[0], e[1]), r);
        prop_assert!((got - want).abs() <= 1e-12 * scale, "{got} vs {want} for {terms:?}");
    }

    #[test]
    fn ball_rule_is_exact_to_declared_degree(
        r in 0.5f64..2.0,
        nr in 1usize..8,
        nt in 1usize..8,
        np in 1usize..16,
        seeds in prop::collection::vec((-1.0f64..1.0, any::<u64>()), 1..6),
    ) {
        let rule = ball_rule(r, nr, nt, np).unwrap();
        let terms = random_terms(3, rule.exactness_degree(), &seeds);
        let (got, want, scale) = compare(&rule, &terms, |e| ball_monomial(r, e[0], e[1], e[2]), r);
        prop_assert!((got - want).abs() <= 1e-12 * scale, "{got} vs {want} for {terms:?}");
    }

    #[test]
    fn time_rule_is_exact_to_declared_degree(
        horizon in 0.01f64..5.0,
        n in 1usize..16,
        seeds in prop::collection::vec((-1.0f64..1.0, any::<u64>()), 1..6),
    ) {
        let rule = time_rule(horizon, n).unwrap();
        let terms = random_terms(1, rule.exactness_degree(), &seeds);
        let oracle = |e: &[u32]| horizon.powi(e[0] as i32 + 1) / (e[0] + 1) as f64;
        let (got, want, scale) = compare(&rule, &terms, oracle, horizon);
        prop_assert!((got - want).abs() <= 1e-12 * scale, "{got} vs {want}");
    }
}

#[test]
fn interval_examples() {
    let rule = interval_rule(1.0, 5).unwrap();
    assert!((rule.integrate(|_| 1.0) - 2.0).abs() < 1e-14);
    assert!((rule.integrate(|x| x[0] * x[0]) - 2.0 / 3.0).abs() < 1e-14);
    assert!(rule.integrate(|x| x[0]).abs() < 1e-14);
    assert!((interval_rule(3.0, 2).unwrap().integrate(|_| 1.0) - 6.0).abs() < 1e-14);
}

#[test]
fn disk_examples() {
    let rule = disk_rule(1.0, 10, 20).unwrap();
    assert!((rule.integrate(|_| 1.0) - PI).abs() < 1e-12);
    let quartic = rule.integrate(|x| (x[0] * x[0] + x[1] * x[1]).powi(2));
    assert!((quartic - PI / 3.0).abs() < 1e-12);
    assert!(rule.integrate(|x| x[0].powi(3)).abs() < 1e-12);
    assert!((disk_rule(2.0, 3, 4).unwrap().integrate(|_| 1.0) - 4.0 * PI).abs() < 1e-12);
}

#[test]
fn ball_examples() {
    let rule = ball_rule(1.0, 6, 6, 12).unwrap();
    assert!((rule.integrate(|_| 1.0) - 4.0 * PI / 3.0).abs() < 1e-12);
    let r2 = rule.integrate(|x| x.iter().map(|v| v * v).sum());
    assert!((r2 - 4.0 * PI / 5.0).abs() < 1e-12);
    assert!(rule.integrate(|x| x[2]).abs() < 1e-12);
}

#[test]
fn time_examples() {
    for n in [1usize, 3, 10] {
        let rule = time_rule(0.7, n).unwrap();
        assert!((rule.integrate(|_| 1.0) - 0.7).abs() < 1e-14);
        assert!((rule.integrate(|t| t[0]) - 0.245).abs() < 1e-14);
        assert!(rule.nodes().iter().all(|t| t[0] > 0.0 && t[0] < 0.7));
    }
    let rule = time_rule(1.0, 10).unwrap();
    assert!((rule.integrate(|t| t[0].exp()) - (E - 1.0)).abs() < 1e-10);
}

#[test]
fn rules_have_positive_weights_and_interior_nodes() {
    for dim in 1..=3 {
        for r in [0.5, 1.0, 2.0] {
            let domain = BallDomain::new(dim, r).unwrap();
            let rule = spatial_rule(&domain, 10, 20).unwrap();
            assert_eq!(rule.dim(), dim);
            assert!(rule.weights().iter().all(|&w| w > 0.0));
            for i in 0..rule.len() {
                let n2: f64 = rule.node(i).iter().map(|v| v * v).sum();
                assert!(n2.sqrt() < r);
            }
            let vol: f64 = rule.weights().iter().sum();
            assert!((vol - domain.volume()).abs() < 1e-12 * domain.volume());
        }
    }
}

#[test]
fn rules_are_deterministic() {
    assert_eq!(
        disk_rule(1.3, 7, 11).unwrap(),
        disk_rule(1.3, 7, 11).unwrap()
    );
    assert_eq!(
        ball_rule(1.0, 4, 5, 6).unwrap(),
        ball_rule(1.0, 4, 5, 6).unwrap()
    );
}

#[test]
fn rejects_empty_rules() {
    assert!(interval_rule(1.0, 0).is_err());
    assert!(disk_rule(1.0, 0, 4).is_err());
    assert!(disk_rule(1.0, 4, 0).is_err());
    assert!(ball_rule(1.0, 1, 1, 0).is_err());
    assert!(time_rule(0.0, 3).is_err());
    assert!(time_rule(1.0, 0).is_err());
}
