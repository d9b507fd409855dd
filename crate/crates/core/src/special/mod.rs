//! Special functions used by the eigenfunction series.

pub mod bessel;
pub mod gauss;
pub mod harmonics;
pub mod zeros;

pub use bessel::{bessel_j, bessel_j_sequence, spherical_bessel_j, spherical_bessel_j_sequence};
pub use gauss::gauss_legendre;
pub use harmonics::{real_spherical_harmonic, real_spherical_harmonics};
pub use zeros::{bessel_zeros, BesselKind, BesselZeroTable};
