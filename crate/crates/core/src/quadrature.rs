//! Quadrature rules on the interval, disk and ball, and the time rule on `(0, T)`.
//!
//! The disk rule is a Gauss rule for the radial weight `r` tensored with
//! equispaced angles, which is the node structure of Zernike-type disk
//! integration. The ball rule uses a Gauss rule for weight `r²`, Gauss-Legendre
//! in `cos θ` and equispaced azimuths. All nodes are strictly interior and all
//! weights are positive.

use std::f64::consts::PI;

use crate::domain::BallDomain;
use crate::error::{Error, Result};
use crate::special::gauss::{legendre_nodes, radial_nodes};

/// Nodes and positive weights of a cubature rule in 1, 2 or 3 dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    dim: usize,
    nodes: Vec<[f64; 3]>,
    weights: Vec<f64>,
    exactness_degree: usize,
}

impl QuadratureRule {
    pub(crate) fn from_line(x: Vec<f64>, w: Vec<f64>, exactness_degree: usize) -> Self {
        Self {
            dim: 1,
            nodes: x.into_iter().map(|v| [v, 0.0, 0.0]).collect(),
            weights: w,
            exactness_degree,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// The `i`th node as a slice of length `dim()`.
    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i][..self.dim]
    }

    /// Raw node storage; unused trailing coordinates are zero.
    pub fn nodes(&self) -> &[[f64; 3]] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Total polynomial degree integrated exactly.
    pub fn exactness_degree(&self) -> usize {
        self.exactness_degree
    }

    pub fn integrate(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        (0..self.len())
            .map(|i| self.weights[i] * f(self.node(i)))
            .sum()
    }
}

fn check_positive_count(n: usize, what: &str) -> Result<()> {
    if n == 0 {
        return Err(Error::domain(format!("{what} must be at least 1")));
    }
    Ok(())
}

fn check_length(v: f64, what: &str) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::domain(format!(
            "{what} must be positive and finite, got {v}"
        )));
    }
    Ok(())
}

/// Gauss-Legendre rule on `(−R, R)`.
pub fn interval_rule(radius: f64, n_nodes: usize) -> Result<QuadratureRule> {
    check_length(radius, "radius")?;
    check_positive_count(n_nodes, "node count")?;
    let (x, w) = legendre_nodes(n_nodes)?;
    Ok(QuadratureRule::from_line(
        x.iter().map(|v| v * radius).collect(),
        w.iter().map(|v| v * radius).collect(),
        2 * n_nodes - 1,
    ))
}

/// Gauss-Legendre rule mapped to `(0, T)`.
pub fn time_rule(horizon: f64, n_nodes: usize) -> Result<QuadratureRule> {
    check_length(horizon, "time horizon")?;
    check_positive_count(n_nodes, "node count")?;
    let (x, w) = legendre_nodes(n_nodes)?;
    let h = 0.5 * horizon;
    Ok(QuadratureRule::from_line(
        x.iter().map(|v| h * (1.0 + v)).collect(),
        w.iter().map(|v| h * v).collect(),
        2 * n_nodes - 1,
    ))
}

/// Disk rule: `n_radial` Gauss nodes for `r dr` on `(0, R)` times
/// `n_angular` equispaced angles `2πj / n_angular`.
pub fn disk_rule(radius: f64, n_radial: usize, n_angular: usize) -> Result<QuadratureRule> {
    check_length(radius, "radius")?;
    check_positive_count(n_radial, "radial node count")?;
    check_positive_count(n_angular, "angular node count")?;
    let (r, wr) = radial_nodes(n_radial, 1)?;
    let wa = 2.0 * PI / n_angular as f64;
    let mut nodes = Vec::with_capacity(n_radial * n_angular);
    let mut weights = Vec::with_capacity(n_radial * n_angular);
    for (ri, wi) in r.iter().zip(&wr) {
        for j in 0..n_angular {
            let (s, c) = (2.0 * PI * j as f64 / n_angular as f64).sin_cos();
            nodes.push([radius * ri * c, radius * ri * s, 0.0]);
            weights.push(radius * radius * wi * wa);
        }
    }
    Ok(QuadratureRule {
        dim: 2,
        nodes,
        weights,
        exactness_degree: (2 * n_radial - 1).min(n_angular - 1),
    })
}

/// Ball rule: Gauss nodes for `r² dr` on `(0, R)`, Gauss-Legendre in `cos θ`
/// and `n_phi` equispaced azimuths.
pub fn ball_rule(
    radius: f64,
    n_radial: usize,
    n_theta: usize,
    n_phi: usize,
) -> Result<QuadratureRule> {
    check_length(radius, "radius")?;
    check_positive_count(n_radial, "radial node count")?;
    check_positive_count(n_theta, "polar node count")?;
    check_positive_count(n_phi, "azimuthal node count")?;
    let (r, wr) = radial_nodes(n_radial, 2)?;
    let (u, wu) = legendre_nodes(n_theta)?;
    let wp = 2.0 * PI / n_phi as f64;
    let r3 = radius * radius * radius;
    let mut nodes = Vec::with_capacity(n_radial * n_theta * n_phi);
    let mut weights = Vec::with_capacity(n_radial * n_theta * n_phi);
    for (ri, wri) in r.iter().zip(&wr) {
        for (ui, wui) in u.iter().zip(&wu) {
            let st = (1.0 - ui * ui).sqrt();
            for k in 0..n_phi {
                let (s, c) = (2.0 * PI * k as f64 / n_phi as f64).sin_cos();
                let rr = radius * ri;
                nodes.push([rr * st * c, rr * st * s, rr * ui]);
                weights.push(r3 * wri * wui * wp);
            }
        }
    }
    Ok(QuadratureRule {
        dim: 3,
        nodes,
        weights,
        exactness_degree: (2 * n_radial - 1).min(2 * n_theta - 1).min(n_phi - 1),
    })
}

/// Spatial rule for `domain` from a radial and an angular node count.
///
/// 1D uses `2·radial` Gauss-Legendre nodes; 2D is [`disk_rule`]; 3D uses
/// `⌈angular/2⌉` polar and `angular` azimuthal nodes.
pub fn spatial_rule(domain: &BallDomain, radial: usize, angular: usize) -> Result<QuadratureRule> {
    let r = domain.radius();
    match domain.dim() {
        1 => interval_rule(r, 2 * radial),
        2 => disk_rule(r, radial, angular),
        _ => ball_rule(r, radial, angular.div_ceil(2), angular),
    }
}
