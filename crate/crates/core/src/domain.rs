//! Domain descriptors shared by every module.

use crate::error::{Error, Result};

/// Relative tolerance on `|y| = R` for exit locations.
pub const SPHERE_TOLERANCE: f64 = 1e-12;

/// The open ball of radius `radius` centered at the origin of `R^dim`, `dim ∈ {1, 2, 3}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallDomain {
    dim: usize,
    radius: f64,
}

impl BallDomain {
    pub fn new(dim: usize, radius: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::config(format!(
                "dimension must be 1, 2 or 3, got {dim}"
            )));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::config(format!(
                "radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Self { dim, radius })
    }

    pub fn unit(dim: usize) -> Result<Self> {
        Self::new(dim, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Lebesgue measure of the ball.
    pub fn volume(&self) -> f64 {
        let r = self.radius;
        match self.dim {
            1 => 2.0 * r,
            2 => std::f64::consts::PI * r * r,
            _ => 4.0 / 3.0 * std::f64::consts::PI * r * r * r,
        }
    }

    /// Expected exit time of Brownian motion started at the center, `R²/n`.
    pub fn mean_exit_time(&self) -> f64 {
        self.radius * self.radius / self.dim as f64
    }

    /// Checks that `x` has the right length and lies in the closed ball.
    pub fn check_point(&self, x: &[f64], what: &str) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::domain(format!(
                "{what} has {} coordinates, expected {}",
                x.len(),
                self.dim
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain(format!("{what} is not finite")));
        }
        let r = norm(x);
        if r > self.radius * (1.0 + SPHERE_TOLERANCE) {
            return Err(Error::domain(format!(
                "{what} at radius {r} lies outside the ball of radius {}",
                self.radius
            )));
        }
        Ok(())
    }
}

/// Truncation of the eigenfunction series.
///
/// `radial_terms` counts zeros per angular index; `angular_terms` is the
/// largest angular index kept (Fourier order in 2D, harmonic degree in 3D,
/// unused in 1D). Terms whose time factor `exp(-λt/2)` falls below
/// `tail_tolerance` are skipped; zero disables the skip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTruncation {
    pub radial_terms: usize,
    pub angular_terms: usize,
    pub tail_tolerance: f64,
}

impl SeriesTruncation {
    pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-18;

    pub fn new(radial_terms: usize, angular_terms: usize, tail_tolerance: f64) -> Result<Self> {
        if radial_terms == 0 {
            return Err(Error::config("at least one radial series term is required"));
        }
        if !(tail_tolerance >= 0.0 && tail_tolerance < 1.0) {
            return Err(Error::config(format!(
                "tail tolerance must lie in [0, 1), got {tail_tolerance}"
            )));
        }
        Ok(Self {
            radial_terms,
            angular_terms,
            tail_tolerance,
        })
    }

    /// 100 terms in 1D, 100 × 100 in 2D, 60 radial × 20 degrees in 3D.
    pub fn default_for(dim: usize) -> Self {
        let (radial_terms, angular_terms) = match dim {
            1 => (100, 0),
            2 => (100, 100),
            _ => (60, 20),
        };
        Self {
            radial_terms,
            angular_terms,
            tail_tolerance: Self::DEFAULT_TAIL_TOLERANCE,
        }
    }

    /// Same tolerance with both term counts doubled.
    pub fn doubled(&self) -> Self {
        Self {
            radial_terms: 2 * self.radial_terms,
            angular_terms: 2 * self.angular_terms.max(1),
            tail_tolerance: self.tail_tolerance,
        }
    }

    /// Largest `λt/2` whose term is still summed.
    pub fn cutoff_exponent(&self) -> f64 {
        if self.tail_tolerance > 0.0 {
            -self.tail_tolerance.ln()
        } else {
            f64::INFINITY
        }
    }
}

/// A sampled exit event: location on the sphere of radius `R` and exit time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitEvent {
    location: [f64; 3],
    dim: usize,
    time: f64,
}

impl ExitEvent {
    pub fn new(domain: &BallDomain, location: &[f64], time: f64) -> Result<Self> {
        if location.len() != domain.dim() {
            return Err(Error::domain("exit location has the wrong dimension"));
        }
        let r = norm(location);
        if (r - domain.radius()).abs() > SPHERE_TOLERANCE * domain.radius() {
            return Err(Error::domain(format!(
                "exit location at radius {r} is not on the sphere of radius {}",
                domain.radius()
            )));
        }
        if !(time.is_finite() && time > 0.0) {
            return Err(Error::domain(format!(
                "exit time must be positive, got {time}"
            )));
        }
        let mut loc = [0.0; 3];
        loc[..location.len()].copy_from_slice(location);
        Ok(Self {
            location: loc,
            dim: domain.dim(),
            time,
        })
    }

    /// Builds the event `R·direction` at `time`; `direction` is normalized first.
    pub fn from_direction(domain: &BallDomain, direction: &[f64], time: f64) -> Result<Self> {
        let d = norm(direction);
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::domain("exit direction must be a nonzero vector"));
        }
        let loc: Vec<f64> = direction.iter().map(|v| v / d * domain.radius()).collect();
        Self::new(domain, &loc, time)
    }

    pub fn location(&self) -> &[f64] {
        &self.location[..self.dim]
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Unit outward direction `ŷ`.
    pub fn direction(&self) -> [f64; 3] {
        let r = norm(self.location());
        let mut out = [0.0; 3];
        for (o, v) in out.iter_mut().zip(self.location()) {
            *o = v / r;
        }
        out
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_domains() {
        assert!(BallDomain::new(0, 1.0).is_err());
        assert!(BallDomain::new(4, 1.0).is_err());
        assert!(BallDomain::new(2, 0.0).is_err());
        assert!(BallDomain::new(2, f64::NAN).is_err());
    }

    #[test]
    fn volumes() {
        let pi = std::f64::consts::PI;
        assert_eq!(BallDomain::new(1, 2.0).unwrap().volume(), 4.0);
        assert!((BallDomain::new(2, 2.0).unwrap().volume() - 4.0 * pi).abs() < 1e-14);
        assert!((BallDomain::new(3, 1.0).unwrap().volume() - 4.0 * pi / 3.0).abs() < 1e-14);
    }

    #[test]
    fn exit_event_must_lie_on_sphere() {
        let d = BallDomain::new(2, 2.0).unwrap();
        assert!(ExitEvent::new(&d, &[2.0, 0.0], 0.3).is_ok());
        assert!(ExitEvent::new(&d, &[1.9, 0.0], 0.3).is_err());
        assert!(ExitEvent::new(&d, &[2.0, 0.0], 0.0).is_err());
        let e = ExitEvent::from_direction(&d, &[3.0, 4.0], 1.0).unwrap();
        assert!((e.location()[0] - 1.2).abs() < 1e-15);
        assert!((e.direction()[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn point_check() {
        let d = BallDomain::unit(3).unwrap();
        assert!(d.check_point(&[0.5, 0.5, 0.5], "x").is_ok());
        assert!(d.check_point(&[1.0, 0.0, 0.0], "x").is_ok());
        assert!(d.check_point(&[0.9, 0.9, 0.0], "x").is_err());
        assert!(d.check_point(&[0.1, 0.1], "x").is_err());
    }
}
