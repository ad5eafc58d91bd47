//! Casimir energy and torque between two parallel films of aligned
//! single-wall carbon nanotubes.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: Bessel functions, adaptive quadrature, Matsubara sums,
//!   the dispersion transform onto the imaginary axis and finite differences.
//! * [`swcnt`]: single-tube geometry, intraband and interband conductivity.
//! * [`film`]: the in-plane conductivity tensor of a dilute nanotube array.
//! * [`lifshitz`]: reflection matrices and the energy/torque evaluators.
//! * [`analysis`]: scaling exponents, crossovers, torque sign flips, fits.
//!
//! Conductivities are carried internally in Gaussian units as the
//! dimensionless combination `2πσ/c`; energies leave the crate in SI
//! (J/m² for energy, N·m/m² for torque).

pub mod analysis;
pub mod error;
pub mod film;
pub mod lifshitz;
pub mod numerics;
pub mod swcnt;
pub mod units;

pub use error::{Error, Result};
