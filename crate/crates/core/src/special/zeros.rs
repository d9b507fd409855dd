//! Positive zeros of `J_ν` and `j_l`.
//!
//! Order-0 zeros are bracketed around McMahon's asymptotic estimate
//! (cylindrical) or are exactly `kπ` (spherical). Higher orders use the
//! interlacing `z_{ν-1,k} < z_{ν,k} < z_{ν-1,k+1}`, so every bracket holds
//! exactly one zero. Each bracket is narrowed by a few bisection steps and
//! finished with safeguarded Newton iterations.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, LazyLock};

use parking_lot::RwLock;

use super::bessel::{jn_pair, sph_jn_pair, MAX_ORDER};
use crate::error::{Error, Result};

pub const MAX_ZERO_COUNT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BesselKind {
    Cylindrical,
    Spherical,
}

/// The first `len()` positive zeros of one Bessel function, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselZeroTable {
    order: usize,
    kind: BesselKind,
    zeros: Vec<f64>,
}

impl BesselZeroTable {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn kind(&self) -> BesselKind {
        self.kind
    }

    pub fn zeros(&self) -> &[f64] {
        &self.zeros
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }
}

type ZeroCache = RwLock<HashMap<(BesselKind, usize), Arc<Vec<f64>>>>;
type TableCache = RwLock<HashMap<(BesselKind, usize, usize), Arc<BesselZeroTable>>>;

// Longest zero list computed so far per (kind, order).
static ZEROS: LazyLock<ZeroCache> = LazyLock::new(Default::default);
static TABLES: LazyLock<TableCache> = LazyLock::new(Default::default);

/// First `count` positive zeros of `J_order` or `j_order`.
pub fn bessel_zeros(order: usize, count: usize, kind: BesselKind) -> Result<Arc<BesselZeroTable>> {
    if count == 0 || count > MAX_ZERO_COUNT {
        return Err(Error::domain(format!(
            "zero count must lie in 1..={MAX_ZERO_COUNT}, got {count}"
        )));
    }
    if order + 1 > MAX_ORDER {
        return Err(Error::domain(format!(
            "Bessel order {order} is not supported"
        )));
    }
    if let Some(t) = TABLES.read().get(&(kind, order, count)) {
        return Ok(t.clone());
    }
    let zeros = zeros_upto(kind, order, count);
    let table = Arc::new(BesselZeroTable {
        order,
        kind,
        zeros: zeros[..count].to_vec(),
    });
    TABLES
        .write()
        .entry((kind, order, count))
        .or_insert_with(|| table.clone());
    Ok(table)
}

/// Shared zero list of length at least `count`.
pub(crate) fn zeros_upto(kind: BesselKind, order: usize, count: usize) -> Arc<Vec<f64>> {
    if let Some(z) = ZEROS.read().get(&(kind, order)) {
        if z.len() >= count {
            return z.clone();
        }
    }
    // Order ν needs count + (order − ν) zeros of every lower order.
    let mut previous: Option<Arc<Vec<f64>>> = None;
    for nu in 0..=order {
        let need = count + (order - nu);
        let cached = ZEROS
            .read()
            .get(&(kind, nu))
            .filter(|z| z.len() >= need)
            .cloned();
        let zeros = match cached {
            Some(z) => z,
            None => {
                let z = Arc::new(compute_zeros(
                    kind,
                    nu,
                    need,
                    previous.as_deref().map(|v| v.as_slice()),
                ));
                let mut cache = ZEROS.write();
                let slot = cache.entry((kind, nu)).or_insert_with(|| z.clone());
                if slot.len() < z.len() {
                    *slot = z.clone();
                }
                z
            }
        };
        previous = Some(zeros);
    }
    previous.expect("loop runs at least once")
}

fn compute_zeros(kind: BesselKind, order: usize, count: usize, lower: Option<&[f64]>) -> Vec<f64> {
    let f = |x: f64| value_and_slope(kind, order, x);
    match (kind, order) {
        (BesselKind::Spherical, 0) => (1..=count).map(|k| k as f64 * PI).collect(),
        (BesselKind::Cylindrical, 0) => (1..=count)
            .map(|k| {
                let guess = mcmahon_order0(k);
                let (lo, hi) = widen_bracket(&f, guess - 0.5, guess + 0.5);
                refine(&f, lo, hi)
            })
            .collect(),
        _ => {
            let lower = lower.expect("lower order zeros are computed first");
            debug_assert!(lower.len() > count);
            (0..count)
                .map(|k| refine(&f, lower[k], lower[k + 1]))
                .collect()
        }
    }
}

/// McMahon's expansion for the `k`th zero of `J_0`.
fn mcmahon_order0(k: usize) -> f64 {
    let beta = (k as f64 - 0.25) * PI;
    let b = 1.0 / (8.0 * beta);
    beta + b - 124.0 / 3.0 * b * b * b
}

fn value_and_slope(kind: BesselKind, order: usize, x: f64) -> (f64, f64) {
    let (v, next) = match kind {
        BesselKind::Cylindrical => jn_pair(order, x),
        BesselKind::Spherical => sph_jn_pair(order, x),
    };
    // J_ν' = (ν/x) J_ν − J_{ν+1}; same identity for j_l.
    (v, order as f64 / x * v - next)
}

fn widen_bracket(f: &impl Fn(f64) -> (f64, f64), mut lo: f64, mut hi: f64) -> (f64, f64) {
    lo = lo.max(1e-3);
    for _ in 0..20 {
        if f(lo).0.signum() != f(hi).0.signum() {
            return (lo, hi);
        }
        lo = (lo - 0.25).max(1e-3);
        hi += 0.25;
    }
    panic!("failed to bracket a Bessel zero near [{lo}, {hi}]");
}

fn refine(f: &impl Fn(f64) -> (f64, f64), mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo).0;
    for _ in 0..4 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid).0;
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..100 {
        let (v, dv) = f(x);
        if v == 0.0 {
            return x;
        }
        if v.signum() == f_lo.signum() {
            lo = x;
            f_lo = v;
        } else {
            hi = x;
        }
        let newton = x - v / dv;
        let next = if dv != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 4.0 * f64::EPSILON * x || hi - lo <= 4.0 * f64::EPSILON * x {
            return next;
        }
        x = next;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::bessel::{bessel_j, spherical_bessel_j};

    /// Bisection on `J_ν` over a bracket, refined to 1e-14.
    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let flo = f(lo);
        while hi - lo > 1e-14 {
            let mid = 0.5 * (lo + hi);
            if f(mid).signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn order_zero_cylindrical_against_bisection_oracle() {
        let t = bessel_zeros(0, 2, BesselKind::Cylindrical).unwrap();
        let j0 = |x: f64| bessel_j(0, x).unwrap();
        for (k, z) in t.zeros().iter().enumerate() {
            let kk = (k + 1) as f64;
            let oracle = bisect(j0, kk * PI - PI / 2.0, kk * PI + PI / 2.0);
            assert!((z - oracle).abs() < 1e-13);
        }
        assert!((t.zeros()[0] - 2.404825557695773).abs() < 1e-14);
        assert!((t.zeros()[1] - 5.520078110286311).abs() < 1e-14);
    }

    #[test]
    fn order_one_first_zero() {
        let t = bessel_zeros(1, 1, BesselKind::Cylindrical).unwrap();
        let oracle = bisect(|x| bessel_j(1, x).unwrap(), 3.0, 4.5);
        assert!((t.zeros()[0] - oracle).abs() < 1e-13);
        assert!((t.zeros()[0] - 3.8317059702075125).abs() < 1e-14);
    }

    #[test]
    fn spherical_order_zero_is_exact() {
        let t = bessel_zeros(0, 3, BesselKind::Spherical).unwrap();
        assert_eq!(t.zeros(), &[PI, 2.0 * PI, 3.0 * PI]);
    }

    #[test]
    fn matches_mpmath_values() {
        // mpmath.besseljzero at 40 digits
        let cases = [
            (BesselKind::Cylindrical, 60, 1, 67.52878576502944690),
            (BesselKind::Cylindrical, 0, 1000, 3140.807295225078629),
            (BesselKind::Spherical, 1, 1, 4.493409457909064175),
            (BesselKind::Spherical, 2, 3, 12.32294097056658205),
            (BesselKind::Spherical, 10, 5, 29.53463410784392443),
        ];
        for (kind, order, k, want) in cases {
            let z = bessel_zeros(order, k, kind).unwrap().zeros()[k - 1];
            assert!((z - want).abs() < 1e-12 * want, "{kind:?} {order} {k}: {z}");
        }
    }

    #[test]
    fn residuals_and_spacing() {
        for order in [0usize, 1, 2, 5, 20, 60] {
            let t = bessel_zeros(order, 200, BesselKind::Cylindrical).unwrap();
            for w in t.zeros().windows(2) {
                assert!(w[1] - w[0] > 2.0);
            }
            for &z in t.zeros() {
                let r = bessel_j(order, z).unwrap().abs() / bessel_j(order + 1, z).unwrap().abs();
                assert!(r < 1e-10, "order {order}, zero {z}: ratio {r}");
            }
            let s = bessel_zeros(order, 100, BesselKind::Spherical).unwrap();
            for w in s.zeros().windows(2) {
                assert!(w[1] - w[0] > 2.0);
            }
            for &z in s.zeros() {
                let r = spherical_bessel_j(order, z).unwrap().abs()
                    / spherical_bessel_j(order + 1, z).unwrap().abs();
                assert!(r < 1e-10, "spherical order {order}, zero {z}: ratio {r}");
            }
        }
    }

    #[test]
    fn cached_tables_are_shared() {
        let a = bessel_zeros(3, 17, BesselKind::Cylindrical).unwrap();
        let b = bessel_zeros(3, 17, BesselKind::Cylindrical).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        let longer = bessel_zeros(3, 40, BesselKind::Cylindrical).unwrap();
        assert_eq!(&longer.zeros()[..17], a.zeros());
    }

    #[test]
    fn rejects_bad_counts() {
        assert!(bessel_zeros(0, 0, BesselKind::Cylindrical).is_err());
        assert!(bessel_zeros(0, MAX_ZERO_COUNT + 1, BesselKind::Cylindrical).is_err());
    }
}
