//! Intraband (Drude, nonlocal) conductivity of a single tube per unit
//! surface, and its finite-temperature correction factor.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{Chirality, ElectronicParams, Frequency, SpectralPoint};
use crate::units::{ALPHA, C, EV, HBAR, K_B};
use crate::{Error, Result};

fn prefactor(ch: Chirality, ep: &ElectronicParams) -> f64 {
    2.0 * ALPHA * C * ep.fermi_velocity_m_per_s / (PI * PI * ch.radius_m())
}

/// `σ_intra(k_y, iξ) = (2αc v_F/π²R) (ξ + 1/τ)/((ξ + 1/τ)² + (v_F k_y)²)`
/// in Gaussian units (m/s). Zero-temperature form; see
/// [`thermal_intra_factor`] for the finite-T correction.
pub fn sigma_intra(pt: &SpectralPoint, ch: Chirality, ep: &ElectronicParams) -> Result<f64> {
    pt.validate()?;
    let xi = match pt.frequency {
        Frequency::Imaginary(xi) if xi >= 0.0 => xi,
        Frequency::Imaginary(xi) => {
            return Err(Error::Domain {
                function: "sigma_intra",
                value: xi,
                reason: "imaginary frequency must be >= 0",
            })
        }
        Frequency::Real(_) => {
            return Err(Error::InvalidParameter(
                "sigma_intra takes an imaginary-axis point; use sigma_intra_real_axis".into(),
            ))
        }
    };
    let g = xi + 1.0 / ep.relaxation_time_s();
    let vk = ep.fermi_velocity_m_per_s * pt.k_y;
    Ok(prefactor(ch, ep) * g / (g * g + vk * vk))
}

/// Complex `σ_intra(k_y, ω)` on the real axis (time dependence `e^{-iωt}`),
/// Gaussian units.
pub fn sigma_intra_real_axis(
    pt: &SpectralPoint,
    ch: Chirality,
    ep: &ElectronicParams,
) -> Result<Complex64> {
    pt.validate()?;
    let omega = match pt.frequency {
        Frequency::Real(w) => w,
        Frequency::Imaginary(_) => {
            return Err(Error::InvalidParameter(
                "sigma_intra_real_axis takes a real-axis point".into(),
            ))
        }
    };
    let g = Complex64::new(1.0 / ep.relaxation_time_s(), -omega);
    let vk = ep.fermi_velocity_m_per_s * pt.k_y;
    Ok(prefactor(ch, ep) * g / (g * g + vk * vk))
}

/// Finite-temperature factor multiplying the intraband conductivity,
///
/// `F = (k_BT/ħv_Fk_y) |ln((e^{(μ-ħv_Fk_y)/k_BT} - 1)/(e^{μ/k_BT} - 1))|`.
///
/// Evaluated in log-sum-exp form. `T = 0` returns 1 (the zero-temperature
/// conductivity is used unmodified) and `k_y = 0` returns the analytic limit
/// `1/(1 - e^{-μ/k_BT})`. The logarithmic singularity at `ħv_Fk_y = μ` is
/// clamped at a relative distance of `1e-12`.
pub fn thermal_intra_factor(
    k_y: f64,
    temperature_k: f64,
    chemical_potential_ev: f64,
    fermi_velocity: f64,
) -> Result<f64> {
    if !(k_y >= 0.0) || !k_y.is_finite() {
        return Err(Error::Domain {
            function: "thermal_intra_factor",
            value: k_y,
            reason: "k_y must be finite and >= 0",
        });
    }
    if !(temperature_k >= 0.0) {
        return Err(Error::Domain {
            function: "thermal_intra_factor",
            value: temperature_k,
            reason: "temperature must be >= 0",
        });
    }
    if !(chemical_potential_ev > 0.0) {
        return Err(Error::Domain {
            function: "thermal_intra_factor",
            value: chemical_potential_ev,
            reason: "chemical potential must be > 0",
        });
    }
    if temperature_k == 0.0 {
        return Ok(1.0);
    }
    let kt = K_B * temperature_k;
    let a = chemical_potential_ev * EV / kt;
    let b = HBAR * fermi_velocity * k_y / kt;
    // ln(1 - e^{-a}), shared by both branches
    let denom = (-(-a).exp()).ln_1p();
    if b == 0.0 {
        return Ok(1.0 / -(-a).exp_m1());
    }
    let gap = (a - b).abs().max(1e-12 * a.max(1.0));
    let log = if b < a {
        -b + (-(-gap).exp()).ln_1p() - denom
    } else {
        (-(-gap).exp_m1()).ln() - a - denom
    };
    Ok(log.abs() / b)
}
