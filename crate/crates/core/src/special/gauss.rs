//! Gauss rules: Legendre on `[-1, 1]` and Jacobi-type rules for the weight
//! `x^power` on `(0, 1)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;

pub const MAX_NODES: usize = 512;

/// Gauss-Legendre rule on `[-1, 1]`, exact for polynomials of degree `2·nodes − 1`.
pub fn gauss_legendre(nodes: usize) -> Result<QuadratureRule> {
    let (x, w) = legendre_nodes(nodes)?;
    Ok(QuadratureRule::from_line(x, w, 2 * nodes - 1))
}

/// Nodes (ascending) and weights of the `n`-point Gauss-Legendre rule.
pub(crate) fn legendre_nodes(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    check_count(n)?;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 {
                dp = legendre_with_derivative(n, z).1;
                break;
            }
        }
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    Ok((x, w))
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Nodes in `(0, 1)` and weights of the `n`-point Gauss rule for `∫_0^1 f(x) x^power dx`.
///
/// Golub-Welsch on the Jacobi matrix of `(1+u)^power` on `[-1, 1]`, followed
/// by Newton polishing of the nodes and Christoffel weights.
pub(crate) fn radial_nodes(n: usize, power: u32) -> Result<(Vec<f64>, Vec<f64>)> {
    check_count(n)?;
    let beta = power as f64;
    let diag = |k: usize| {
        let s = 2.0 * k as f64 + beta;
        beta * beta / (s * (s + 2.0))
    };
    let off = |k: usize| {
        // k ≥ 1
        let kf = k as f64;
        let s = 2.0 * kf + beta;
        (4.0 * kf * kf * (kf + beta) * (kf + beta) / (s * s * (s + 1.0) * (s - 1.0))).sqrt()
    };
    let mu0 = 2f64.powi(power as i32 + 1) / (beta + 1.0);

    let mut jm = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        jm[(k, k)] = diag(k);
        if k + 1 < n {
            let b = off(k + 1);
            jm[(k, k + 1)] = b;
            jm[(k + 1, k)] = b;
        }
    }
    let mut u: Vec<f64> = SymmetricEigen::new(jm)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    u.sort_by(f64::total_cmp);

    // Orthonormal polynomials p_0..p_n and p_n' at u.
    let eval = |u: f64| {
        let mut p_prev = 0.0;
        let mut p = 1.0 / mu0.sqrt();
        let mut d_prev = 0.0;
        let mut d = 0.0;
        let mut sum_sq = p * p;
        for k in 0..n {
            let b_next = off(k + 1);
            let b_k = if k == 0 { 0.0 } else { off(k) };
            let p_next = ((u - diag(k)) * p - b_k * p_prev) / b_next;
            let d_next = (p + (u - diag(k)) * d - b_k * d_prev) / b_next;
            p_prev = p;
            p = p_next;
            d_prev = d;
            d = d_next;
            if k + 1 < n {
                sum_sq += p * p;
            }
        }
        (p, d, sum_sq)
    };

    let mut x = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for &u0 in &u {
        let mut ui = u0;
        for _ in 0..3 {
            let (p, d, _) = eval(ui);
            if d == 0.0 {
                break;
            }
            ui -= p / d;
        }
        let (_, _, sum_sq) = eval(ui);
        let scale = 0.5f64.powi(power as i32 + 1);
        x.push(0.5 * (1.0 + ui));
        w.push(scale / sum_sq);
    }
    Ok((x, w))
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_NODES {
        return Err(Error::domain(format!(
            "Gauss rule size must lie in 1..={MAX_NODES}, got {n}"
        )));
    }
    Ok(())
}
