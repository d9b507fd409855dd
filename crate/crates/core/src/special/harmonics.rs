//! Real orthonormal spherical harmonics.
//!
//! `Y_l^m` for `m > 0` is `√2 N_l^m P_l^m(cos θ) cos(mφ)`, for `m < 0` it is
//! `√2 N_l^|m| P_l^|m|(cos θ) sin(|m|φ)` and `Y_l^0 = N_l^0 P_l(cos θ)`, without
//! the Condon-Shortley phase. The basis is orthonormal on the unit sphere and
//! satisfies `Σ_m Y_l^m(u)·Y_l^m(v) = (2l+1)/(4π) P_l(u·v)`.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};

/// Largest degree accepted.
pub const MAX_DEGREE: usize = 128;

/// `Y_l^m(θ, φ)` with `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
pub fn real_spherical_harmonic(l: usize, m: i64, theta: f64, phi: f64) -> Result<f64> {
    if l > MAX_DEGREE {
        return Err(Error::domain(format!(
            "harmonic degree {l} exceeds {MAX_DEGREE}"
        )));
    }
    if m.unsigned_abs() as usize > l {
        return Err(Error::domain(format!("|m| = {} exceeds l = {l}", m.abs())));
    }
    check_angles(theta, phi)?;
    let all = harmonics_from_angles(l, theta.cos(), theta.sin(), phi);
    Ok(all[flat_index(l, m)])
}

/// All `Y_l^m(θ, φ)` with `l ≤ lmax`, indexed by `l² + l + m`.
pub fn real_spherical_harmonics(lmax: usize, theta: f64, phi: f64) -> Result<Vec<f64>> {
    if lmax > MAX_DEGREE {
        return Err(Error::domain(format!(
            "harmonic degree {lmax} exceeds {MAX_DEGREE}"
        )));
    }
    check_angles(theta, phi)?;
    Ok(harmonics_from_angles(lmax, theta.cos(), theta.sin(), phi))
}

/// Harmonics at the direction of a nonzero 3-vector.
pub(crate) fn harmonics_for_direction(lmax: usize, v: &[f64]) -> Vec<f64> {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let cos_t = (v[2] / r).clamp(-1.0, 1.0);
    let sin_t = (v[0] * v[0] + v[1] * v[1]).sqrt() / r;
    let phi = v[1].atan2(v[0]);
    harmonics_from_angles(lmax, cos_t, sin_t, phi)
}

/// Index of `(l, m)` in the flat arrays returned by this module.
pub fn flat_index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

fn check_angles(theta: f64, phi: f64) -> Result<()> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::domain(format!("polar angle {theta} outside [0, π]")));
    }
    if !(0.0..2.0 * PI).contains(&phi) {
        return Err(Error::domain(format!("azimuth {phi} outside [0, 2π)")));
    }
    Ok(())
}

fn harmonics_from_angles(lmax: usize, cos_t: f64, sin_t: f64, phi: f64) -> Vec<f64> {
    let n = (lmax + 1) * (lmax + 1);
    let mut out = vec![0.0; n];
    // P̄_l^m = N_l^m P_l^m(cos θ), built column by column in m.
    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    for m in 0..=lmax {
        if m > 0 {
            pmm *= ((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * sin_t;
        }
        let (s, c) = (m as f64 * phi).sin_cos();
        let azimuth = |p: f64, out: &mut [f64], l: usize| {
            if m == 0 {
                out[flat_index(l, 0)] = p;
            } else {
                out[flat_index(l, m as i64)] = SQRT_2 * p * c;
                out[flat_index(l, -(m as i64))] = SQRT_2 * p * s;
            }
        };
        azimuth(pmm, &mut out, m);
        if m == lmax {
            break;
        }
        let mut p_prev = pmm;
        let mut p_cur = ((2 * m + 3) as f64).sqrt() * cos_t * pmm;
        azimuth(p_cur, &mut out, m + 1);
        for l in (m + 2)..=lmax {
            let lf = l as f64;
            let mf = m as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0))
                .sqrt();
            let p_next = a * (cos_t * p_cur - b * p_prev);
            p_prev = p_cur;
            p_cur = p_next;
            azimuth(p_cur, &mut out, l);
        }
    }
    out
}
