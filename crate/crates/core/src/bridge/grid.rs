//! Killed-bridge density from the origin, evaluated on a fixed spatial grid.
//!
//! Everything that depends only on the grid and the truncation is computed
//! once: the radial eigenfunctions at each distinct node radius, multiplied by
//! their normalizations and boundary slopes. Per exit event only the angular
//! factors between the distinct node directions and `ŷ` and the time factors
//! remain.

use std::collections::HashMap;
use std::sync::Arc;

use super::{angular_factors, AbsorbedDensityModel, ClampCounter, Spectrum, DEGENERATE_THRESHOLD};
use crate::domain::{norm, ExitEvent};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;

/// Relative size of the last retained denominator term above which the
/// denominator series counts as unconverged.
const DENOMINATOR_TAIL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct GridKernel {
    spectrum: Arc<Spectrum>,
    clamps: Arc<ClampCounter>,
    rule: QuadratureRule,
    shells: usize,
    node_shell: Vec<usize>,
    node_dir: Vec<usize>,
    /// Distinct node directions; tensor rules repeat them on every shell.
    dirs: Vec<[f64; 3]>,
    /// `[shell][k]`: the mode-0 factor of `f(x, t; 0)` without time factor.
    numer: Vec<f64>,
    /// `[a][shell][k]`: factors of the boundary derivative at `x`.
    deriv: Vec<Vec<f64>>,
    /// `[k]`: factors of the boundary derivative at the origin.
    den: Vec<f64>,
}

impl GridKernel {
    /// Kernel for `model` on the nodes of `rule` (a spatial rule of the same dimension).
    pub fn new(model: &AbsorbedDensityModel, rule: &QuadratureRule) -> Result<Self> {
        let sp = model.spectrum().clone();
        let dim = sp.dim;
        if rule.dim() != dim {
            return Err(Error::domain(
                "quadrature rule dimension does not match the domain",
            ));
        }
        for i in 0..rule.len() {
            model
                .domain()
                .check_point(rule.node(i), "quadrature node")?;
        }
        let k_max = sp.truncation.radial_terms;

        // Distinct radii (1D: distinct coordinates).
        let key = |i: usize| {
            if dim == 1 {
                rule.node(i)[0]
            } else {
                norm(rule.node(i))
            }
        };
        let mut radii: Vec<f64> = Vec::new();
        let mut node_shell = Vec::with_capacity(rule.len());
        for i in 0..rule.len() {
            let r = key(i);
            let tol = 1e-13 * sp.radius;
            let idx = match radii.iter().position(|&q| (q - r).abs() <= tol) {
                Some(p) => p,
                None => {
                    radii.push(r);
                    radii.len() - 1
                }
            };
            node_shell.push(idx);
        }
        let mut dirs: Vec<[f64; 3]> = Vec::new();
        let mut buckets: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
        let mut node_dir = Vec::with_capacity(rule.len());
        for i in 0..rule.len() {
            let x = rule.node(i);
            let n = norm(x);
            let mut u = [0.0; 3];
            if n > 0.0 {
                for (o, v) in u.iter_mut().zip(x) {
                    *o = v / n;
                }
            }
            // Directions that straddle a bucket edge are merely kept twice.
            let key = u.map(|c| (c * 1e10).round() as i64);
            let bucket = buckets.entry(key).or_default();
            let same = |d: &[f64; 3]| d.iter().zip(&u).all(|(a, b)| (a - b).abs() <= 1e-13);
            let idx = match bucket.iter().find(|&&j| same(&dirs[j])) {
                Some(&j) => j,
                None => {
                    dirs.push(u);
                    bucket.push(dirs.len() - 1);
                    dirs.len() - 1
                }
            };
            node_dir.push(idx);
        }

        let a0 = match dim {
            3 => 1.0 / (4.0 * std::f64::consts::PI),
            _ => 1.0,
        };
        let m0 = &sp.modes[0];
        let phi_origin = |k: usize| if dim == 1 { sp.phi(0, k, 0.0) } else { 1.0 };
        let mut numer = Vec::with_capacity(radii.len() * k_max);
        for &r in &radii {
            for k in 0..k_max {
                numer.push(a0 * m0.coef[k] * sp.phi(0, k, r) * phi_origin(k));
            }
        }
        let deriv = sp
            .modes
            .iter()
            .enumerate()
            .map(|(a, m)| {
                let mut d = Vec::with_capacity(radii.len() * k_max);
                for &r in &radii {
                    for k in 0..k_max {
                        // 1D slopes depend on the exit side and are applied per event.
                        let slope = if dim == 1 { 1.0 } else { m.boundary_slope[k] };
                        d.push(m.coef[k] * sp.phi(a, k, r) * slope);
                    }
                }
                d
            })
            .collect();
        let den = (0..k_max)
            .map(|k| {
                let slope = if dim == 1 { 1.0 } else { m0.boundary_slope[k] };
                a0 * m0.coef[k] * phi_origin(k) * slope
            })
            .collect();
        Ok(Self {
            clamps: model.clamp_counter().clone(),
            rule: rule.clone(),
            shells: radii.len(),
            node_shell,
            node_dir,
            dirs,
            numer,
            deriv,
            den,
            spectrum: sp,
        })
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    /// Number of distinct node radii.
    pub fn shells(&self) -> usize {
        self.shells
    }

    /// `∫_0^T ∫ g(x, t) p(x, t) dx dt` for the killed bridge from the origin
    /// to `exit`, with `time_rule` given on `(0, 1)` and scaled to `(0, T)`.
    pub fn integrate(
        &self,
        exit: &ExitEvent,
        time_rule: &QuadratureRule,
        g: &dyn Fn(&[f64], f64) -> f64,
    ) -> Result<f64> {
        let horizon = exit.time();
        let ctx = self.prepare(
            exit,
            time_rule.nodes().iter().map(|u| u[0]).fold(1.0, f64::min),
        )?;
        let mut slice = vec![0.0; self.rule.len()];
        let mut total = 0.0;
        for j in 0..time_rule.len() {
            let t = horizon * time_rule.node(j)[0];
            self.fill(&ctx, t, &mut slice);
            let mut inner = 0.0;
            for (i, kb) in slice.iter().enumerate() {
                inner += self.rule.weights()[i] * g(self.rule.node(i), t) * kb;
            }
            total += horizon * time_rule.weights()[j] * inner;
        }
        Ok(total)
    }

    /// Killed-bridge density at every node at time `t ∈ (0, T)`.
    pub fn density_on_grid(&self, exit: &ExitEvent, t: f64) -> Result<Vec<f64>> {
        let horizon = exit.time();
        if !(t > 0.0 && t < horizon) {
            return Err(Error::domain(format!("t = {t} must lie in (0, {horizon})")));
        }
        let ctx = self.prepare(exit, 1.0 - t / horizon)?;
        let mut out = vec![0.0; self.rule.len()];
        self.fill(&ctx, t, &mut out);
        Ok(out)
    }

    /// Denominator and angular factors for one exit event; `min_remaining`
    /// is the smallest `(T − t)/T` that will be requested.
    fn prepare(&self, exit: &ExitEvent, min_remaining: f64) -> Result<EventContext> {
        let sp = &*self.spectrum;
        let dim = sp.dim;
        if exit.location().len() != dim {
            return Err(Error::domain("exit event has the wrong dimension"));
        }
        let horizon = exit.time();
        let dir = exit.direction();
        let m0 = &sp.modes[0];
        let cutoff = sp.truncation.cutoff_exponent();

        let signs: Vec<f64> = if dim == 1 {
            let plus = dir[0] > 0.0;
            (0..m0.coef.len())
                .map(|k| {
                    if plus {
                        m0.boundary_slope[k]
                    } else {
                        -m0.wavenumber[k]
                    }
                })
                .collect()
        } else {
            Vec::new()
        };

        let mut den = 0.0;
        let mut last = 0.0;
        let mut exhausted = true;
        for k in 0..self.den.len() {
            let e = m0.half_lambda[k] * horizon;
            if e > cutoff {
                exhausted = false;
                break;
            }
            let s = if dim == 1 { signs[k] } else { 1.0 };
            last = self.den[k] * s * (-e).exp();
            den += last;
        }
        if !(den.is_finite() && den < -DEGENERATE_THRESHOLD) {
            return Err(Error::DegenerateBridge(format!(
                "boundary flux {den:e} at T = {horizon}"
            )));
        }
        if exhausted && last.abs() > DENOMINATOR_TAIL * den.abs() {
            return Err(Error::DegenerateBridge(format!(
                "boundary flux series unconverged at T = {horizon}; more radial terms needed"
            )));
        }

        let active = if dim == 1 {
            1
        } else {
            sp.active_modes(horizon * min_remaining).max(1)
        };
        let mut angular = Vec::new();
        if dim > 1 {
            angular = vec![0.0; self.dirs.len() * active];
            for (i, u) in self.dirs.iter().enumerate() {
                let c: f64 = u
                    .iter()
                    .zip(&dir)
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    .clamp(-1.0, 1.0);
                angular_factors(dim, c, &mut angular[i * active..(i + 1) * active]);
            }
        }
        Ok(EventContext {
            horizon,
            den,
            signs,
            active,
            angular,
        })
    }

    fn fill(&self, ctx: &EventContext, t: f64, out: &mut [f64]) {
        let sp = &*self.spectrum;
        let k_max = sp.truncation.radial_terms;
        let cutoff = sp.truncation.cutoff_exponent();
        let ns = self.shells;
        let s = ctx.horizon - t;

        // Mode-0 numerator per shell.
        let m0 = &sp.modes[0];
        let mut exps = Vec::with_capacity(k_max);
        for k in 0..k_max {
            let e = m0.half_lambda[k] * t;
            if e > cutoff {
                break;
            }
            exps.push((-e).exp());
        }
        let numer: Vec<f64> = (0..ns)
            .map(|sh| dot(&self.numer[sh * k_max..sh * k_max + exps.len()], &exps))
            .collect();

        // Boundary derivative per (shell, mode).
        let active = sp.active_modes(s).min(ctx.active).max(1);
        let mut dsh = vec![0.0; active * ns];
        for a in 0..active {
            let m = &sp.modes[a];
            exps.clear();
            for k in 0..k_max {
                let e = m.half_lambda[k] * s;
                if e > cutoff {
                    break;
                }
                let sign = if sp.dim == 1 { ctx.signs[k] } else { 1.0 };
                exps.push(sign * (-e).exp());
            }
            let d = &self.deriv[a];
            for sh in 0..ns {
                dsh[sh * active + a] = dot(&d[sh * k_max..sh * k_max + exps.len()], &exps);
            }
        }

        for (i, o) in out.iter_mut().enumerate() {
            let sh = self.node_shell[i];
            let d = if sp.dim == 1 {
                dsh[sh]
            } else {
                let j = self.node_dir[i];
                let f = &ctx.angular[j * ctx.active..j * ctx.active + active];
                dot(f, &dsh[sh * active..(sh + 1) * active])
            };
            *o = self.clamps.clamp(numer[sh] * d / ctx.den);
        }
    }
}

struct EventContext {
    horizon: f64,
    den: f64,
    signs: Vec<f64>,
    active: usize,
    angular: Vec<f64>,
}

/// Dot product with four independent partial sums.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (x, y) in ca.zip(cb) {
        for j in 0..4 {
            acc[j] += x[j] * y[j];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}
