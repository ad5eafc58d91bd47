//! Single-wall carbon nanotube: geometry, intraband response and interband
//! response (zone-folding tight binding with Kubo–Greenwood, Lorentz
//! oscillators, or tabulated data).

mod interband;
mod intraband;
mod tight_binding;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::units::{CC_BOND_NM, C, EV, HBAR, NM};
use crate::{Error, Result};

pub use interband::{
    load_tabulated, sigma_inter_imag_axis, sigma_inter_real_axis, InterbandModel,
    InterbandResponse, Oscillator, TabulatedConductivity,
};
pub use intraband::{sigma_intra, sigma_intra_real_axis, thermal_intra_factor};
pub use tight_binding::{
    interband_velocity, kubo_transitions, tb_subbands, zigzag_translation_nm, KuboTransition,
};

/// Chiral indices `(n, m)` with `n ≥ 1`, `0 ≤ m ≤ n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[u32; 2]", into = "[u32; 2]")]
pub struct Chirality {
    n: u32,
    m: u32,
}

impl Chirality {
    pub fn new(n: u32, m: u32) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter(format!(
                "chirality ({n},{m}): n must be >= 1"
            )));
        }
        if m > n {
            return Err(Error::InvalidParameter(format!(
                "chirality ({n},{m}): m must satisfy 0 <= m <= n"
            )));
        }
        Ok(Self { n, m })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn is_zigzag(&self) -> bool {
        self.m == 0
    }

    /// Metallic (in the zone-folding sense) iff `(n − m) mod 3 = 0`.
    pub fn is_metallic(&self) -> bool {
        (self.n - self.m) % 3 == 0
    }

    /// Tube radius in nm.
    pub fn radius_nm(&self) -> f64 {
        tube_radius(*self)
    }

    pub fn radius_m(&self) -> f64 {
        self.radius_nm() * NM
    }
}

impl TryFrom<[u32; 2]> for Chirality {
    type Error = Error;

    fn try_from(v: [u32; 2]) -> Result<Self> {
        Chirality::new(v[0], v[1])
    }
}

impl From<Chirality> for [u32; 2] {
    fn from(c: Chirality) -> Self {
        [c.n, c.m]
    }
}

/// `R = (√3 b/2π) √(m² + nm + n²)` with `b = 0.142 nm`.
pub fn tube_radius(ch: Chirality) -> f64 {
    let (n, m) = (ch.n as f64, ch.m as f64);
    3f64.sqrt() * CC_BOND_NM / (2.0 * PI) * (m * m + n * m + n * n).sqrt()
}

/// Electronic parameters of one tube.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ElectronicParams {
    /// `ħ/τ` in meV.
    #[serde(rename = "hbar_over_tau_meV")]
    pub hbar_over_tau_mev: f64,
    /// Fermi velocity, m/s.
    pub fermi_velocity_m_per_s: f64,
    /// Chemical potential, eV.
    #[serde(rename = "chemical_potential_eV")]
    pub chemical_potential_ev: f64,
    /// Effective mass in electron masses (enters ω_p only).
    pub effective_mass_me: f64,
    /// Surface electron density, m⁻² (enters ω_p only).
    pub surface_density_per_m2: f64,
    /// Nearest-neighbour hopping γ₀, eV (tight-binding interband model).
    #[serde(rename = "hopping_eV")]
    pub hopping_ev: f64,
}

impl Default for ElectronicParams {
    fn default() -> Self {
        Self {
            hbar_over_tau_mev: 6.61,
            fermi_velocity_m_per_s: C / 300.0,
            chemical_potential_ev: 0.5,
            effective_mass_me: 0.1,
            surface_density_per_m2: 1e17,
            hopping_ev: 2.7,
        }
    }
}

impl ElectronicParams {
    /// τ in seconds.
    pub fn relaxation_time_s(&self) -> f64 {
        HBAR / (self.hbar_over_tau_mev * 1e-3 * EV)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("hbar_over_tau_meV", self.hbar_over_tau_mev),
            ("fermi_velocity_m_per_s", self.fermi_velocity_m_per_s),
            ("effective_mass_me", self.effective_mass_me),
            ("surface_density_per_m2", self.surface_density_per_m2),
            ("hopping_eV", self.hopping_ev),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.chemical_potential_ev > 0.0) || !self.chemical_potential_ev.is_finite() {
            return Err(Error::InvalidParameter(
                "chemical_potential_eV must be finite and > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Which frequency axis a spectral point lives on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frequency {
    /// Real angular frequency ω, rad/s.
    Real(f64),
    /// Imaginary frequency ξ (ω = iξ), rad/s.
    Imaginary(f64),
}

/// Evaluation point for a conductivity: axial wavenumber, frequency and
/// temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    /// `|k_y|` along the tube axis, 1/m.
    pub k_y: f64,
    pub frequency: Frequency,
    /// Kelvin; 0 selects the zero-temperature intraband conductivity.
    pub temperature_k: f64,
}

impl SpectralPoint {
    pub fn imaginary(k_y: f64, xi: f64, temperature_k: f64) -> Self {
        Self {
            k_y,
            frequency: Frequency::Imaginary(xi),
            temperature_k,
        }
    }

    pub fn real(k_y: f64, omega: f64, temperature_k: f64) -> Self {
        Self {
            k_y,
            frequency: Frequency::Real(omega),
            temperature_k,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.k_y >= 0.0) || !self.k_y.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "k_y must be finite and >= 0, got {}",
                self.k_y
            )));
        }
        if !(self.temperature_k >= 0.0) {
            return Err(Error::InvalidParameter("temperature must be >= 0".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_examples() {
        let r = tube_radius(Chirality::new(12, 0).unwrap());
        // √3·0.142/(2π)·12
        let oracle = 3f64.sqrt() * 0.142 / (2.0 * PI) * 12.0;
        assert!((r - oracle).abs() < 1e-15);
        assert!((r - 0.4697).abs() < 1e-4);
        let r1 = tube_radius(Chirality::new(1, 0).unwrap());
        assert!((r1 - 0.03914).abs() < 1e-5);
    }

    #[test]
    fn invalid_chirality_rejected() {
        assert!(Chirality::new(0, 0).is_err());
        assert!(Chirality::new(3, 4).is_err());
        assert!(Chirality::try_from([0, 1]).is_err());
    }

    #[test]
    fn metallicity_rule() {
        assert!(Chirality::new(12, 0).unwrap().is_metallic());
        assert!(!Chirality::new(13, 0).unwrap().is_metallic());
        assert!(Chirality::new(10, 10).unwrap().is_metallic());
        assert!(!Chirality::new(10, 5).unwrap().is_metallic());
    }

    #[test]
    fn default_relaxation_time_is_100_fs() {
        let tau = ElectronicParams::default().relaxation_time_s();
        assert!((tau / 1e-13 - 1.0).abs() < 0.01, "{tau}");
    }
}
