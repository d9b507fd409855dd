//! Transition density of Brownian motion absorbed at the sphere of radius `R`,
//! its radial derivative at the boundary, and the bridge densities built from
//! them.
//!
//! With eigenvalues `λ` of `−Δ` under Dirichlet conditions the absorbed
//! density is `f(x, t; x') = Σ φ(x) φ(x') exp(−λt/2)`:
//!
//! - 1D: `φ_k(x) = sin(√λ_k (x + R)) / √R`, `λ_k = (kπ / 2R)²`.
//! - 2D: modes `J_n(z_{nk} r / R) cos(nθ)` and `sin(nθ)`, `λ = (z_{nk}/R)²`,
//!   giving `Σ_n ε_n cos(n Δθ) Σ_k J_n(·)J_n(·) / (πR² J_{n+1}(z)²) e^{−λt/2}`
//!   with `ε_0 = 1`, `ε_n = 2`.
//! - 3D: modes `j_l(z_{lk} r / R) Y_l^m`, giving
//!   `Σ_l Σ_m Y_l^m(x̂) Y_l^m(x̂') Σ_k 2 j_l(·) j_l(·) / (R³ j_{l+1}(z)²) e^{−λt/2}`.
//!
//! The density is symmetric in `x` and `x'`, so the bridge from `x_0` to `x_T`
//! is `f(x, t; x_0) f(x, T−t; x_T) / f(x_T, T; x_0)`. Letting `x_T` approach
//! the boundary point `Rŷ` both factors involving `x_T` vanish and their ratio
//! becomes a ratio of radial derivatives at `r = R`, which is the killed-bridge
//! density.

mod grid;

use std::f64::consts::PI;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;

use crate::domain::{norm, BallDomain, ExitEvent, SeriesTruncation};
use crate::error::{Error, Result};
use crate::special::bessel::{jn, sph_jn};
use crate::special::harmonics::{flat_index, harmonics_for_direction, MAX_DEGREE};
use crate::special::zeros::{zeros_upto, BesselKind, MAX_ZERO_COUNT};

pub use grid::GridKernel;

/// Below `SMALL_TIME_FACTOR · R²` the truncated series loses accuracy.
pub const SMALL_TIME_FACTOR: f64 = 1e-3;
/// Largest angular index accepted in 2D.
pub const MAX_FOURIER_ORDER: usize = 1000;
/// Denominators closer to zero than this are treated as degenerate.
pub(crate) const DEGENERATE_THRESHOLD: f64 = 1e-300;

/// Eigen-data for one angular index.
#[derive(Debug)]
pub(crate) struct Mode {
    /// `λ_k / 2`.
    pub half_lambda: Vec<f64>,
    /// `√λ_k`, the factor multiplying `r` (or `x + R` in 1D).
    pub wavenumber: Vec<f64>,
    /// Normalization `1 / ‖φ_k‖²` (angular constants excluded).
    pub coef: Vec<f64>,
    /// Radial derivative of the radial eigenfunction at `r = R`. In 1D this
    /// is the outward derivative at `x = +R`.
    pub boundary_slope: Vec<f64>,
}

#[derive(Debug)]
pub(crate) struct Spectrum {
    pub dim: usize,
    pub radius: f64,
    pub truncation: SeriesTruncation,
    pub modes: Vec<Mode>,
}

impl Spectrum {
    fn new(domain: &BallDomain, truncation: SeriesTruncation) -> Result<Self> {
        let dim = domain.dim();
        let radius = domain.radius();
        let k_max = truncation.radial_terms;
        if k_max > MAX_ZERO_COUNT {
            return Err(Error::domain(format!(
                "at most {MAX_ZERO_COUNT} radial terms are supported, got {k_max}"
            )));
        }
        let l_max = truncation.angular_terms;
        match dim {
            2 if l_max > MAX_FOURIER_ORDER => {
                return Err(Error::domain(format!(
                    "at most {MAX_FOURIER_ORDER} angular terms are supported in 2D"
                )))
            }
            3 if l_max > MAX_DEGREE => {
                return Err(Error::domain(format!(
                    "at most {MAX_DEGREE} angular terms are supported in 3D"
                )))
            }
            _ => {}
        }
        let modes = match dim {
            1 => {
                let mut m = Mode {
                    half_lambda: Vec::with_capacity(k_max),
                    wavenumber: Vec::with_capacity(k_max),
                    coef: vec![1.0 / radius; k_max],
                    boundary_slope: Vec::with_capacity(k_max),
                };
                for k in 1..=k_max {
                    let w = k as f64 * PI / (2.0 * radius);
                    m.half_lambda.push(0.5 * w * w);
                    m.wavenumber.push(w);
                    m.boundary_slope.push(if k % 2 == 0 { w } else { -w });
                }
                vec![m]
            }
            _ => {
                let kind = if dim == 2 {
                    BesselKind::Cylindrical
                } else {
                    BesselKind::Spherical
                };
                zeros_upto(kind, l_max, k_max);
                (0..=l_max)
                    .map(|a| {
                        let zeros = zeros_upto(kind, a, k_max);
                        let mut m = Mode {
                            half_lambda: Vec::with_capacity(k_max),
                            wavenumber: Vec::with_capacity(k_max),
                            coef: Vec::with_capacity(k_max),
                            boundary_slope: Vec::with_capacity(k_max),
                        };
                        for &z in &zeros[..k_max] {
                            let w = z / radius;
                            let next = if dim == 2 {
                                jn(a + 1, z)
                            } else {
                                sph_jn(a + 1, z)
                            };
                            let norm = if dim == 2 {
                                PI * radius * radius * next * next
                            } else {
                                0.5 * radius.powi(3) * next * next
                            };
                            m.half_lambda.push(0.5 * w * w);
                            m.wavenumber.push(w);
                            m.coef.push(1.0 / norm);
                            m.boundary_slope.push(-w * next);
                        }
                        m
                    })
                    .collect()
            }
        };
        Ok(Self {
            dim,
            radius,
            truncation,
            modes,
        })
    }

    /// Radial eigenfunction `k` of angular index `a` at radius `r` (2D/3D)
    /// or at coordinate `x` (1D).
    pub fn phi(&self, a: usize, k: usize, r: f64) -> f64 {
        let w = self.modes[a].wavenumber[k];
        match self.dim {
            1 => (w * (r + self.radius)).sin(),
            2 => jn(a, w * r),
            _ => sph_jn(a, w * r),
        }
    }

    /// `Σ_k coef_k · term(k) · exp(−λ_k t / 2)` for angular index `a`, dropping
    /// terms whose exponent exceeds the cut-off.
    fn mode_sum(&self, a: usize, t: f64, term: impl Fn(usize) -> f64) -> f64 {
        let m = &self.modes[a];
        let cutoff = self.truncation.cutoff_exponent();
        let mut s = 0.0;
        for k in 0..m.coef.len() {
            let e = m.half_lambda[k] * t;
            if e > cutoff {
                break;
            }
            s += m.coef[k] * term(k) * (-e).exp();
        }
        s
    }

    /// Angular indices whose first exponent is within the cut-off at time `t`.
    fn active_modes(&self, t: f64) -> usize {
        let cutoff = self.truncation.cutoff_exponent();
        self.modes
            .iter()
            .take_while(|m| m.half_lambda[0] * t <= cutoff)
            .count()
    }
}

/// Angular factors `A_a(cos γ)` for `a < out.len()`: `ε_n cos(nγ)` in 2D and
/// `(2l+1)/(4π) P_l(cos γ)` in 3D.
pub(crate) fn angular_factors(dim: usize, c: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    match dim {
        2 => {
            let (mut prev, mut cur) = (1.0, c);
            out[0] = 1.0;
            for o in out.iter_mut().skip(1) {
                *o = 2.0 * cur;
                let next = 2.0 * c * cur - prev;
                prev = cur;
                cur = next;
            }
        }
        _ => {
            let (mut prev, mut cur) = (1.0, c);
            let inv4pi = 1.0 / (4.0 * PI);
            out[0] = inv4pi;
            for l in 1..out.len() {
                out[l] = (2 * l + 1) as f64 * inv4pi * cur;
                let lf = l as f64;
                let next = ((2.0 * lf + 1.0) * c * cur - lf * prev) / (lf + 1.0);
                prev = cur;
                cur = next;
            }
        }
    }
}

/// Clamping statistics shared by a model and its grid kernels.
#[derive(Debug, Default)]
pub(crate) struct ClampCounter {
    count: AtomicU64,
    max_bits: AtomicU64,
}

impl ClampCounter {
    /// Returns `max(v, 0)`, recording negative inputs.
    pub fn clamp(&self, v: f64) -> f64 {
        if v >= 0.0 {
            return v;
        }
        self.count.fetch_add(1, Ordering::Relaxed);
        // Bit patterns of non-negative floats are ordered like the floats.
        self.max_bits.fetch_max((-v).to_bits(), Ordering::Relaxed);
        0.0
    }

    pub fn stats(&self) -> ClampStats {
        ClampStats {
            count: self.count.load(Ordering::Relaxed),
            max_magnitude: f64::from_bits(self.max_bits.load(Ordering::Relaxed)),
        }
    }
}

/// How often a truncated series came out negative and by how much at most.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ClampStats {
    pub count: u64,
    pub max_magnitude: f64,
}

impl ClampStats {
    pub fn merge(self, other: ClampStats) -> ClampStats {
        ClampStats {
            count: self.count + other.count,
            max_magnitude: self.max_magnitude.max(other.max_magnitude),
        }
    }
}

/// Truncated eigenfunction series of the absorbed heat kernel on one ball.
#[derive(Debug, Clone)]
pub struct AbsorbedDensityModel {
    domain: BallDomain,
    spectrum: Arc<Spectrum>,
    clamps: Arc<ClampCounter>,
    warned: Arc<AtomicBool>,
}

impl AbsorbedDensityModel {
    pub fn new(domain: BallDomain, truncation: SeriesTruncation) -> Result<Self> {
        Ok(Self {
            spectrum: Arc::new(Spectrum::new(&domain, truncation)?),
            domain,
            clamps: Arc::default(),
            warned: Arc::default(),
        })
    }

    /// Model with the default truncation for the dimension.
    pub fn with_defaults(domain: BallDomain) -> Result<Self> {
        Self::new(domain, SeriesTruncation::default_for(domain.dim()))
    }

    pub fn domain(&self) -> &BallDomain {
        &self.domain
    }

    pub fn truncation(&self) -> &SeriesTruncation {
        &self.spectrum.truncation
    }

    /// Eigenvalues `λ_k` of angular index `a`.
    pub fn eigenvalues(&self, a: usize) -> Option<Vec<f64>> {
        self.spectrum
            .modes
            .get(a)
            .map(|m| m.half_lambda.iter().map(|h| 2.0 * h).collect())
    }

    pub fn clamp_stats(&self) -> ClampStats {
        self.clamps.stats()
    }

    pub(crate) fn spectrum(&self) -> &Arc<Spectrum> {
        &self.spectrum
    }

    pub(crate) fn clamp_counter(&self) -> &Arc<ClampCounter> {
        &self.clamps
    }

    pub(crate) fn note_time(&self, t: f64) {
        let floor = SMALL_TIME_FACTOR * self.domain.radius().powi(2);
        if t < floor && !self.warned.swap(true, Ordering::Relaxed) {
            log::warn!(
                "series evaluated at t = {t:.3e} below the accuracy floor {floor:.3e}; \
                 increase the truncation if results look off"
            );
        }
    }

    fn check_time(t: f64) -> Result<()> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::domain(format!(
                "time must be positive and finite, got {t}"
            )));
        }
        Ok(())
    }

    /// Cosine of the angle between two points (1 if either is the origin).
    fn cos_angle(x: &[f64], y: &[f64]) -> f64 {
        let (nx, ny) = (norm(x), norm(y));
        if nx == 0.0 || ny == 0.0 {
            return 1.0;
        }
        let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        (dot / (nx * ny)).clamp(-1.0, 1.0)
    }

    /// `Σ_a A_a Σ_k coef φ_ak(|x|) · other(a, k) e^{−λt/2}` for 2D/3D.
    fn angular_series(
        &self,
        x: &[f64],
        y: &[f64],
        t: f64,
        other: impl Fn(usize, usize) -> f64,
    ) -> f64 {
        let sp = &*self.spectrum;
        let active = sp.active_modes(t);
        if active == 0 {
            return 0.0;
        }
        let rx = norm(x);
        let ry = norm(y);
        let mut factors = vec![0.0; active];
        if sp.dim == 3 && rx > 0.0 && ry > 0.0 {
            let hx = harmonics_for_direction(active - 1, &pad3(x));
            let hy = harmonics_for_direction(active - 1, &pad3(y));
            for (l, f) in factors.iter_mut().enumerate() {
                *f = (-(l as i64)..=l as i64)
                    .map(|m| hx[flat_index(l, m)] * hy[flat_index(l, m)])
                    .sum();
            }
        } else {
            angular_factors(sp.dim, Self::cos_angle(x, y), &mut factors);
        }
        let mut total = 0.0;
        for (a, f) in factors.iter().enumerate() {
            if *f == 0.0 || (rx == 0.0 && a > 0) {
                continue;
            }
            total += f * sp.mode_sum(a, t, |k| sp.phi(a, k, rx) * other(a, k));
        }
        total
    }

    /// Unclamped series value of `f(x, t; x_start)`.
    fn raw_density(&self, x: &[f64], t: f64, x_start: &[f64]) -> f64 {
        let sp = &*self.spectrum;
        if sp.dim == 1 {
            return sp.mode_sum(0, t, |k| sp.phi(0, k, x[0]) * sp.phi(0, k, x_start[0]));
        }
        let r0 = norm(x_start);
        self.angular_series(x, x_start, t, |a, k| sp.phi(a, k, r0))
    }

    /// Unclamped `∂_r f(x_other, t; rŷ)` at `r = R`.
    fn raw_boundary_derivative(&self, y_hat: &[f64], t: f64, x_other: &[f64]) -> f64 {
        let sp = &*self.spectrum;
        if sp.dim == 1 {
            // The outward derivative at −R is −φ'(−R) = −√λ.
            let plus = y_hat[0] > 0.0;
            let m = &sp.modes[0];
            return sp.mode_sum(0, t, |k| {
                let slope = if plus {
                    m.boundary_slope[k]
                } else {
                    -m.wavenumber[k]
                };
                sp.phi(0, k, x_other[0]) * slope
            });
        }
        let modes = &sp.modes;
        self.angular_series(x_other, y_hat, t, |a, k| modes[a].boundary_slope[k])
    }

    /// Absorbed transition density `f(x, t; x_start)`, clamped at zero.
    pub fn absorbed_density(&self, x: &[f64], t: f64, x_start: &[f64]) -> Result<f64> {
        self.domain.check_point(x, "x")?;
        self.domain.check_point(x_start, "start point")?;
        Self::check_time(t)?;
        self.note_time(t);
        Ok(self.clamps.clamp(self.raw_density(x, t, x_start)))
    }

    /// Radial derivative at `r = R` of `f(x_other, t; rŷ)`, equivalently of
    /// `f(rŷ, t; x_other)`, from term-wise differentiation of the series.
    pub fn boundary_radial_derivative(
        &self,
        y_hat: &[f64],
        t: f64,
        x_other: &[f64],
    ) -> Result<f64> {
        self.check_direction(y_hat)?;
        self.domain.check_point(x_other, "x")?;
        Self::check_time(t)?;
        self.note_time(t);
        Ok(self.raw_boundary_derivative(y_hat, t, x_other))
    }

    fn check_direction(&self, y_hat: &[f64]) -> Result<()> {
        if y_hat.len() != self.domain.dim() || (norm(y_hat) - 1.0).abs() > 1e-9 {
            return Err(Error::domain("boundary direction must be a unit vector"));
        }
        Ok(())
    }

    /// Density at `(x, t)` of the bridge from `x0` at time 0 to `x_end` at
    /// time `horizon`, confined to the ball.
    pub fn bridge_density_interior(
        &self,
        x: &[f64],
        t: f64,
        x0: &[f64],
        x_end: &[f64],
        horizon: f64,
    ) -> Result<f64> {
        self.domain.check_point(x, "x")?;
        self.domain.check_point(x0, "start point")?;
        self.domain.check_point(x_end, "end point")?;
        Self::check_time(horizon)?;
        if !(t > 0.0 && t < horizon) {
            return Err(Error::domain(format!("t = {t} must lie in (0, {horizon})")));
        }
        self.note_time(t.min(horizon - t));
        let den = self.raw_density(x_end, horizon, x0);
        if !(den.is_finite() && den > DEGENERATE_THRESHOLD) {
            return Err(Error::DegenerateBridge(format!(
                "endpoint density {den:e} at T = {horizon}"
            )));
        }
        let num = self.raw_density(x, t, x0) * self.raw_density(x, horizon - t, x_end);
        Ok(self.clamps.clamp(num / den))
    }

    /// Density at `(x, t)` of the path from `x0` conditioned to first leave
    /// the ball at `exit`.
    pub fn killed_bridge_density(
        &self,
        x: &[f64],
        t: f64,
        x0: &[f64],
        exit: &ExitEvent,
    ) -> Result<f64> {
        self.domain.check_point(x, "x")?;
        self.domain.check_point(x0, "start point")?;
        let horizon = exit.time();
        if exit.location().len() != self.domain.dim() {
            return Err(Error::domain("exit event has the wrong dimension"));
        }
        if !(t > 0.0 && t < horizon) {
            return Err(Error::domain(format!("t = {t} must lie in (0, {horizon})")));
        }
        self.note_time(t.min(horizon - t));
        let dir = exit.direction();
        let y_hat = &dir[..self.domain.dim()];
        let den = self.raw_boundary_derivative(y_hat, horizon, x0);
        if !(den.is_finite() && den < -DEGENERATE_THRESHOLD) {
            return Err(Error::DegenerateBridge(format!(
                "boundary flux {den:e} at T = {horizon}"
            )));
        }
        let num = self.raw_density(x, t, x0) * self.raw_boundary_derivative(y_hat, horizon - t, x);
        Ok(self.clamps.clamp(num / den))
    }
}

fn pad3(x: &[f64]) -> [f64; 3] {
    let mut out = [0.0; 3];
    out[..x.len()].copy_from_slice(x);
    out
}
