//! Expectations of path integrals of Brownian motion killed at the boundary
//! of the `n`-ball (`n = 1, 2, 3`).
//!
//! Instead of simulating paths, the bridge estimator samples only the exit
//! time and exit location of each path and integrates the integrand against
//! the density of the Brownian bridge confined to the ball and pinned to that
//! exit event. The inner space-time integral is evaluated with deterministic
//! quadrature:
//!
//! ```text
//! E[ ∫_0^T g(X_t, t) dt ] = E_{(y,T)} [ ∫_0^T ∫_B g(x, t) p(x, t | 0, y, T) dx dt ]
//! ```
//!
//! where `p` is the killed-bridge density obtained from the eigenfunction
//! series of the absorbed heat kernel (see [`bridge`]).
//!
//! Modules:
//!
//! - [`special`]: Bessel functions, their zeros, real spherical harmonics and
//!   Gauss-Legendre rules.
//! - [`quadrature`]: interval, disk, ball and time rules.
//! - [`bridge`]: absorbed transition densities, boundary derivatives and
//!   bridge densities, plus a per-grid cache used by the estimator.
//! - [`exit`]: exit-time law (density, survival, inverse-transform sampling)
//!   and uniform exit locations.
//! - [`estimator`]: the Monte Carlo bridge estimator.
//! - [`em`]: killed Euler-Maruyama baseline.
//! - [`study`]: bootstrap RMSE convergence studies, CSV output and plot scripts.

pub mod bridge;
pub mod domain;
pub mod em;
pub mod error;
pub mod estimator;
pub mod exit;
pub mod parallel;
pub mod quadrature;
pub mod special;
pub mod study;

pub use domain::{BallDomain, ExitEvent, SeriesTruncation};
pub use error::{Error, Result};
pub use estimator::{EstimateReport, EstimatorConfig, Integrand};
