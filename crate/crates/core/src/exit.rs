//! Exit-time law and exit-location law of Brownian motion started at the
//! center of the ball.
//!
//! The survival function is a sum of decaying exponentials,
//! `S(t) = Σ_k a_k exp(−ρ_k t)`, and the density is `Σ_k a_k ρ_k exp(−ρ_k t)`:
//!
//! | n | `ρ_k`                        | `a_k`                       |
//! |---|------------------------------|-----------------------------|
//! | 1 | `(2k+1)²π² / (8R²)`, `k ≥ 0` | `(−1)^k 4 / ((2k+1)π)`      |
//! | 2 | `z_k² / (2R²)`, `J_0(z_k)=0` | `2 / (z_k J_1(z_k))`        |
//! | 3 | `k²π² / (2R²)`, `k ≥ 1`      | `2 (−1)^{k+1}`              |
//!
//! At `t = 0` these series converge only conditionally, so the law is cut at
//! `t_min = 10⁻⁶ R²`: below it `S = 1` and the density is zero. The true mass
//! below `t_min` is smaller than `exp(−10⁵)`. Just above `t_min` the series
//! equals 1 up to rounding noise, so `S` is also held at exactly 1 below the
//! point where `1 − S` reaches `10⁻¹³`; this keeps `S` monotone.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::domain::BallDomain;
use crate::error::{Error, Result};
use crate::parallel::compensated_sum;
use crate::special::bessel::jn;
use crate::special::zeros::{zeros_upto, BesselKind};

/// `t_min / R²`.
pub const T_MIN_FACTOR: f64 = 1e-6;
/// Size of the first omitted survival term at `t_min`.
const TRUNCATION_TOLERANCE: f64 = 1e-12;
/// Terms below this are dropped once they decay monotonically.
const TAIL_TOLERANCE: f64 = 1e-18;
const S_AT_T_MAX: f64 = 1e-15;
/// `1 − S` below which the survival is reported as exactly 1.
const FLAT_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct ExitLawModel {
    domain: BallDomain,
    rates: Vec<f64>,
    coefficients: Vec<f64>,
    t_min: f64,
    t_flat: f64,
    t_max: f64,
}

impl ExitLawModel {
    pub fn new(domain: BallDomain) -> Result<Self> {
        let r2 = domain.radius() * domain.radius();
        let t_min = T_MIN_FACTOR * r2;
        let keep = |a: f64, rate: f64| a.abs() * (-rate * t_min).exp() >= TRUNCATION_TOLERANCE;
        let mut rates = Vec::new();
        let mut coefficients = Vec::new();
        match domain.dim() {
            1 => {
                for k in 0.. {
                    let m = (2 * k + 1) as f64;
                    let rate = m * m * PI * PI / (8.0 * r2);
                    let a = if k % 2 == 0 { 4.0 } else { -4.0 } / (m * PI);
                    if !keep(a, rate) {
                        break;
                    }
                    rates.push(rate);
                    coefficients.push(a);
                }
            }
            2 => {
                // z ≈ kπ, so this count is enough for the cut-off above.
                let z_max = (2.0 * 40.0 / T_MIN_FACTOR).sqrt();
                let count = (z_max / PI) as usize + 10;
                let zeros = zeros_upto(BesselKind::Cylindrical, 0, count);
                for &z in &zeros[..count] {
                    let rate = z * z / (2.0 * r2);
                    let a = 2.0 / (z * jn(1, z));
                    if !keep(a, rate) {
                        break;
                    }
                    rates.push(rate);
                    coefficients.push(a);
                }
            }
            _ => {
                for k in 1.. {
                    let kp = k as f64 * PI;
                    let rate = kp * kp / (2.0 * r2);
                    let a = if k % 2 == 1 { 2.0 } else { -2.0 };
                    if !keep(a, rate) {
                        break;
                    }
                    rates.push(rate);
                    coefficients.push(a);
                }
            }
        }
        let mut model = Self {
            domain,
            rates,
            coefficients,
            t_min,
            t_flat: t_min,
            t_max: 0.0,
        };
        let mut t_max =
            ((model.coefficients[0].abs() / S_AT_T_MAX).ln() / model.rates[0]).max(t_min);
        while model.exit_time_survival(t_max)? >= S_AT_T_MAX {
            t_max *= 1.1;
        }
        model.t_max = t_max;
        // 1 − S is increasing, so bisect (in log t) for 1 − S = FLAT_TOLERANCE.
        let (mut lo, mut hi) = (t_min, t_max);
        for _ in 0..100 {
            let mid = (lo * hi).sqrt();
            if 1.0 - model.series(mid, false) <= FLAT_TOLERANCE {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        model.t_flat = lo;
        Ok(model)
    }

    pub fn domain(&self) -> &BallDomain {
        &self.domain
    }

    /// Number of retained series terms.
    pub fn terms(&self) -> usize {
        self.rates.len()
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    /// Upper end of the sampling range; `S(t_max) < 10⁻¹⁵`.
    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// Density of the exit time at `t > 0`.
    pub fn exit_time_pdf(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || t.is_nan() {
            return Err(Error::domain(format!(
                "exit-time density needs t > 0, got {t}"
            )));
        }
        if t < self.t_min || t.is_infinite() {
            return Ok(0.0);
        }
        Ok(self.series(t, true).max(0.0))
    }

    /// `P(T > t)`.
    pub fn exit_time_survival(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::domain(format!("survival needs t ≥ 0, got {t}")));
        }
        if t <= self.t_flat {
            return Ok(1.0);
        }
        if t.is_infinite() {
            return Ok(0.0);
        }
        Ok(self.series(t, false).clamp(0.0, 1.0))
    }

    fn series(&self, t: f64, density: bool) -> f64 {
        let mut terms = Vec::with_capacity(64);
        for (&a, &rate) in self.coefficients.iter().zip(&self.rates) {
            let e = (-rate * t).exp();
            let term = if density { a * rate * e } else { a * e };
            terms.push(term);
            if rate * t > 2.0 && term.abs() < TAIL_TOLERANCE {
                break;
            }
        }
        compensated_sum(terms)
    }

    /// `∫ pdf dt`, integrated term by term.
    pub fn total_probability(&self) -> f64 {
        compensated_sum(
            self.coefficients
                .iter()
                .zip(&self.rates)
                .map(|(a, r)| a * (-r * self.t_min).exp()),
        )
    }

    /// `∫ t·pdf dt`, integrated term by term.
    pub fn mean(&self) -> f64 {
        let t0 = self.t_min;
        compensated_sum(
            self.coefficients
                .iter()
                .zip(&self.rates)
                .map(|(a, r)| a * (-r * t0).exp() * (t0 + 1.0 / r)),
        )
    }

    /// Inverse-transform sample: solves `S(t) = u` on `[t_min, t_max]`.
    pub fn sample_exit_time<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u = 1.0 - rng.random::<f64>();
        self.quantile_of_survival(u)
    }

    /// The `t` with `S(t) = u`, clamped to `[t_min, t_max]`.
    pub fn quantile_of_survival(&self, u: f64) -> f64 {
        let s = |t: f64| self.series(t, false);
        let (mut lo, mut hi) = (self.t_flat, self.t_max);
        if u >= s(lo) {
            return lo;
        }
        if u <= s(hi) {
            return hi;
        }
        let mut t = ((self.coefficients[0] / u).ln() / self.rates[0]).clamp(lo, hi);
        for _ in 0..200 {
            let f = s(t) - u;
            if f == 0.0 {
                return t;
            }
            if f > 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            let slope = -self.series(t, true);
            let newton = t - f / slope;
            let next = if slope < 0.0 && newton > lo && newton < hi {
                newton
            } else {
                (lo * hi).sqrt()
            };
            if (next - t).abs() <= 1e-14 * t || (hi - lo) <= 1e-14 * hi {
                return next;
            }
            t = next;
        }
        t
    }
}

/// Uniform point on the sphere of radius `R`.
pub fn sample_exit_location<R: Rng + ?Sized>(domain: &BallDomain, rng: &mut R) -> [f64; 3] {
    let r = domain.radius();
    match domain.dim() {
        1 => [if rng.random::<bool>() { r } else { -r }, 0.0, 0.0],
        2 => {
            let (s, c) = (2.0 * PI * rng.random::<f64>()).sin_cos();
            [r * c, r * s, 0.0]
        }
        _ => loop {
            let v: [f64; 3] = [
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            ];
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if n > 1e-12 {
                break [r * v[0] / n, r * v[1] / n, r * v[2] / n];
            }
        },
    }
}
