//! Bessel functions of the first kind of integer order, cylindrical `J_n` and
//! spherical `j_l`, for non-negative real arguments.
//!
//! Evaluation regimes:
//!
//! - `x < 1`: ascending power series.
//! - `x >= max(25, 2·order)`: Hankel asymptotic expansion for the two lowest
//!   orders followed by upward recurrence (stable while `order < x`).
//! - otherwise: Miller's downward recurrence, normalized by the Neumann sum
//!   `J_0 + 2 Σ J_2k = 1` (cylindrical) or by the closed forms of `j_0, j_1`
//!   (spherical).

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

/// Largest order accepted by the public entry points.
pub const MAX_ORDER: usize = 2048;

const SERIES_MAX_X: f64 = 1.0;
const ASYMPTOTIC_MIN_X: f64 = 25.0;
const RESCALE_ABOVE: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

fn check_args(order: usize, x: f64) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::domain(format!(
            "Bessel order {order} exceeds the supported maximum {MAX_ORDER}"
        )));
    }
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::domain(format!(
            "Bessel argument must be finite and non-negative, got {x}"
        )));
    }
    Ok(())
}

/// Cylindrical Bessel function of the first kind `J_order(x)`.
pub fn bessel_j(order: usize, x: f64) -> Result<f64> {
    check_args(order, x)?;
    Ok(jn(order, x))
}

/// `[J_0(x), J_1(x), …, J_max_order(x)]` from a single recurrence pass.
pub fn bessel_j_sequence(max_order: usize, x: f64) -> Result<Vec<f64>> {
    check_args(max_order, x)?;
    let mut out = vec![0.0; max_order + 1];
    if x == 0.0 {
        out[0] = 1.0;
    } else if x >= asymptotic_threshold(max_order) {
        let (j0, j1) = j01_asymptotic(x);
        forward_cylindrical(j0, j1, x, &mut out);
    } else if x < SERIES_MAX_X {
        for (n, o) in out.iter_mut().enumerate() {
            *o = series_cylindrical(n, x);
        }
    } else {
        miller_cylindrical(x, &mut out);
    }
    Ok(out)
}

/// Spherical Bessel function of the first kind `j_order(x)`; `j_0(x) = sin(x)/x`.
pub fn spherical_bessel_j(order: usize, x: f64) -> Result<f64> {
    check_args(order, x)?;
    Ok(sph_jn(order, x))
}

/// `[j_0(x), …, j_max_order(x)]`.
pub fn spherical_bessel_j_sequence(max_order: usize, x: f64) -> Result<Vec<f64>> {
    check_args(max_order, x)?;
    let mut out = vec![0.0; max_order + 1];
    fill_spherical(x, &mut out);
    Ok(out)
}

fn asymptotic_threshold(order: usize) -> f64 {
    ASYMPTOTIC_MIN_X.max(2.0 * order as f64)
}

/// `J_order(x)` without argument validation.
pub(crate) fn jn(order: usize, x: f64) -> f64 {
    jn_pair(order, x).0
}

/// `(J_order(x), J_{order+1}(x))`.
pub(crate) fn jn_pair(order: usize, x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (if order == 0 { 1.0 } else { 0.0 }, 0.0);
    }
    if x < SERIES_MAX_X {
        return (
            series_cylindrical(order, x),
            series_cylindrical(order + 1, x),
        );
    }
    if x >= asymptotic_threshold(order + 1) {
        let (j0, j1) = j01_asymptotic(x);
        let (mut prev, mut cur) = (j0, j1);
        if order == 0 {
            return (j0, j1);
        }
        for n in 1..=order {
            let next = 2.0 * n as f64 / x * cur - prev;
            prev = cur;
            cur = next;
        }
        return (prev, cur);
    }
    miller_cylindrical_pair(order, x)
}

/// `j_order(x)` without argument validation.
pub(crate) fn sph_jn(order: usize, x: f64) -> f64 {
    sph_jn_pair(order, x).0
}

/// `(j_order(x), j_{order+1}(x))`.
pub(crate) fn sph_jn_pair(order: usize, x: f64) -> (f64, f64) {
    let mut buf = [0.0; 2];
    if x == 0.0 {
        return (if order == 0 { 1.0 } else { 0.0 }, 0.0);
    }
    if x < SERIES_MAX_X {
        return (series_spherical(order, x), series_spherical(order + 1, x));
    }
    if x >= 2.0 * (order + 1) as f64 {
        let (j0, j1) = sph_j01(x);
        let (mut prev, mut cur) = (j0, j1);
        if order == 0 {
            return (j0, j1);
        }
        for l in 1..=order {
            let next = (2 * l + 1) as f64 / x * cur - prev;
            prev = cur;
            cur = next;
        }
        return (prev, cur);
    }
    miller_spherical(x, order, &mut buf);
    (buf[0], buf[1])
}

fn fill_spherical(x: f64, out: &mut [f64]) {
    let max_order = out.len() - 1;
    if x == 0.0 {
        out.fill(0.0);
        out[0] = 1.0;
    } else if x < SERIES_MAX_X {
        for (l, o) in out.iter_mut().enumerate() {
            *o = series_spherical(l, x);
        }
    } else if x >= 2.0 * max_order as f64 {
        let (j0, j1) = sph_j01(x);
        out[0] = j0;
        if max_order >= 1 {
            out[1] = j1;
        }
        for l in 1..max_order {
            out[l + 1] = (2 * l + 1) as f64 / x * out[l] - out[l - 1];
        }
    } else {
        let mut tail = vec![0.0; max_order + 1];
        miller_spherical_all(x, &mut tail);
        out.copy_from_slice(&tail);
    }
}

fn series_cylindrical(order: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut prefactor = 1.0;
    for i in 1..=order {
        prefactor *= half / i as f64;
        if prefactor == 0.0 {
            return 0.0;
        }
    }
    let q = -half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..100 {
        term *= q / (k as f64 * (order + k) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    prefactor * sum
}

fn series_spherical(order: usize, x: f64) -> f64 {
    // j_l(x) = x^l/(2l+1)!! · Σ_k (-x²/2)^k / (k! (2l+3)(2l+5)…(2l+2k+1))
    let mut prefactor = 1.0;
    for i in 1..=order {
        prefactor *= x / (2 * i + 1) as f64;
        if prefactor == 0.0 {
            return 0.0;
        }
    }
    let q = -0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..100 {
        term *= q / (k as f64 * (2 * order + 2 * k + 1) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    prefactor * sum
}

/// Hankel's asymptotic `P(ν, x)` and `Q(ν, x)`; the series is cut at its
/// smallest term.
fn hankel_pq(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0_f64;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        let next = term * (mu - odd * odd) / (kf * 8.0 * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-18 {
            break;
        }
    }
    (p, q)
}

/// `(J_0(x), J_1(x))` for large `x`.
fn j01_asymptotic(x: f64) -> (f64, f64) {
    let (s, c) = x.sin_cos();
    let amp = (2.0 / (PI * x)).sqrt();
    // χ₀ = x − π/4, χ₁ = x − 3π/4, expanded so that only sin x, cos x are reduced.
    let cos0 = (c + s) * FRAC_1_SQRT_2;
    let sin0 = (s - c) * FRAC_1_SQRT_2;
    let cos1 = (s - c) * FRAC_1_SQRT_2;
    let sin1 = -(s + c) * FRAC_1_SQRT_2;
    let (p0, q0) = hankel_pq(0.0, x);
    let (p1, q1) = hankel_pq(1.0, x);
    (amp * (p0 * cos0 - q0 * sin0), amp * (p1 * cos1 - q1 * sin1))
}

fn forward_cylindrical(j0: f64, j1: f64, x: f64, out: &mut [f64]) {
    out[0] = j0;
    if out.len() > 1 {
        out[1] = j1;
    }
    for n in 1..out.len().saturating_sub(1) {
        out[n + 1] = 2.0 * n as f64 / x * out[n] - out[n - 1];
    }
}

fn miller_start(order: usize, x: f64) -> usize {
    let top = order.max(x.ceil() as usize);
    let m = top + 20 + (160.0 * top as f64).sqrt() as usize;
    m + (m % 2)
}

/// Fills `out[n] = J_n(x)` for all `n < out.len()`.
fn miller_cylindrical(x: f64, out: &mut [f64]) {
    let max_order = out.len() - 1;
    let m = miller_start(max_order, x);
    let tox = 2.0 / x;
    let (mut bjp, mut bj, mut sum) = (0.0_f64, 1.0_f64, 0.0_f64);
    for j in (1..=m).rev() {
        let bjm = j as f64 * tox * bj - bjp;
        bjp = bj;
        bj = bjm;
        if bj.abs() > RESCALE_ABOVE {
            bj *= RESCALE_BY;
            bjp *= RESCALE_BY;
            sum *= RESCALE_BY;
            if j < max_order {
                for v in &mut out[j + 1..] {
                    *v *= RESCALE_BY;
                }
            }
        }
        if (j - 1) % 2 == 0 {
            sum += bj;
        }
        if j <= max_order {
            out[j] = bjp;
        }
    }
    out[0] = bj;
    let norm = 2.0 * sum - bj;
    for v in out.iter_mut() {
        *v /= norm;
    }
}

fn miller_cylindrical_pair(order: usize, x: f64) -> (f64, f64) {
    let m = miller_start(order + 1, x);
    let tox = 2.0 / x;
    let (mut bjp, mut bj, mut sum) = (0.0_f64, 1.0_f64, 0.0_f64);
    let (mut a, mut b) = (0.0_f64, 0.0_f64);
    for j in (1..=m).rev() {
        let bjm = j as f64 * tox * bj - bjp;
        bjp = bj;
        bj = bjm;
        if bj.abs() > RESCALE_ABOVE {
            bj *= RESCALE_BY;
            bjp *= RESCALE_BY;
            sum *= RESCALE_BY;
            a *= RESCALE_BY;
            b *= RESCALE_BY;
        }
        if (j - 1) % 2 == 0 {
            sum += bj;
        }
        if j == order + 1 {
            b = bjp;
            a = bj;
        }
    }
    let norm = 2.0 * sum - bj;
    (a / norm, b / norm)
}

fn sph_j01(x: f64) -> (f64, f64) {
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    (j0, j0 / x - c / x)
}

/// Downward recurrence for spherical orders; writes `j_order, j_{order+1}` into `pair`.
fn miller_spherical(x: f64, order: usize, pair: &mut [f64; 2]) {
    let m = miller_start(order + 1, x);
    let (mut bjp, mut bj) = (0.0_f64, 1.0_f64);
    let (mut a, mut b) = (0.0_f64, 0.0_f64);
    let mut b1 = 0.0;
    for l in (1..=m).rev() {
        let bjm = (2 * l + 1) as f64 / x * bj - bjp;
        bjp = bj;
        bj = bjm;
        if bj.abs() > RESCALE_ABOVE {
            bj *= RESCALE_BY;
            bjp *= RESCALE_BY;
            a *= RESCALE_BY;
            b *= RESCALE_BY;
        }
        if l == order + 1 {
            a = bj;
            b = bjp;
        }
        if l == 1 {
            b1 = bjp;
        }
    }
    let scale = spherical_scale(x, bj, b1);
    pair[0] = a * scale;
    pair[1] = b * scale;
}

fn miller_spherical_all(x: f64, out: &mut [f64]) {
    let max_order = out.len() - 1;
    let m = miller_start(max_order, x);
    let (mut bjp, mut bj) = (0.0_f64, 1.0_f64);
    for l in (1..=m).rev() {
        let bjm = (2 * l + 1) as f64 / x * bj - bjp;
        bjp = bj;
        bj = bjm;
        if bj.abs() > RESCALE_ABOVE {
            bj *= RESCALE_BY;
            bjp *= RESCALE_BY;
            if l < max_order {
                for v in &mut out[l + 1..] {
                    *v *= RESCALE_BY;
                }
            }
        }
        if l <= max_order {
            out[l] = bjp;
        }
    }
    out[0] = bj;
    let b1 = if max_order >= 1 { out[1] } else { bjp };
    let scale = spherical_scale(x, bj, b1);
    for v in out.iter_mut() {
        *v *= scale;
    }
}

/// Least-squares scale matching the unnormalized `(b0, b1)` to the closed
/// forms of `(j_0, j_1)`; the pair never vanishes simultaneously.
fn spherical_scale(x: f64, b0: f64, b1: f64) -> f64 {
    let (j0, j1) = sph_j01(x);
    let s = b0.abs().max(b1.abs());
    let (u0, u1) = (b0 / s, b1 / s);
    (j0 * u0 + j1 * u1) / (u0 * u0 + u1 * u1) / s
}
