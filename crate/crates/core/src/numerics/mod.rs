//! Special functions, quadrature, summation and differentiation primitives.
//!
//! Everything here is a pure function of its inputs and safe to call from
//! parallel workers.

mod bessel;
mod derivative;
mod kramers_kronig;
mod matsubara;
mod quadrature;

pub use bessel::{bessel_i0, bessel_i0e, bessel_i0k0, bessel_k0, bessel_k0e};
pub use derivative::{central_derivative, Derivative};
pub use kramers_kronig::{kk_to_imaginary_axis, SpectralSamples, SpectralTail};
pub use matsubara::{matsubara_sum, MatsubaraSpec, MatsubaraSum};
pub use quadrature::{
    integrate_interval, integrate_polar_2d, integrate_semi_infinite, try_integrate_interval,
    try_integrate_polar_2d, try_integrate_semi_infinite, AngularSymmetry, Estimate, PolarOptions,
    QuadratureSpec, ToleranceReference,
};
