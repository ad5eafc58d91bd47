//! Physical constants (CODATA 2018, SI) and unit helpers.

use std::f64::consts::PI;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light, m/s.
pub const C: f64 = 299_792_458.0;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Elementary charge, C.
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Fine-structure constant.
pub const ALPHA: f64 = 7.297_352_569_3e-3;
/// Electron mass, kg.
pub const M_E: f64 = 9.109_383_701_5e-31;
/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// Apéry's constant ζ(3).
pub const ZETA3: f64 = 1.202_056_903_159_594_3;
/// Carbon–carbon bond length, nm.
pub const CC_BOND_NM: f64 = 0.142;

/// Square of the electron charge in Gaussian units expressed through SI
/// quantities, `e² = αħc` (J·m).
pub const E2_GAUSSIAN: f64 = ALPHA * HBAR * C;

/// Graphene conductivity scale `σ₀ = αc/4` (Gaussian, m/s).
pub const SIGMA0: f64 = ALPHA * C / 4.0;

pub const NM: f64 = 1e-9;

/// Joules per electronvolt.
pub const EV: f64 = E_CHARGE;

/// Angular frequency (rad/s) of a photon energy in eV.
pub fn ev_to_rad_per_s(energy_ev: f64) -> f64 {
    energy_ev * EV / HBAR
}

pub fn rad_per_s_to_ev(omega: f64) -> f64 {
    omega * HBAR / EV
}

/// Gaussian surface conductivity (m/s) to the dimensionless `2πσ/c`.
pub fn to_reduced(sigma: f64) -> f64 {
    2.0 * PI * sigma / C
}

pub fn from_reduced(s: f64) -> f64 {
    s * C / (2.0 * PI)
}

/// Ideal-metal Casimir energy per area, `−π²ħc/(720 D³)` (J/m²), D in metres.
pub fn ideal_metal_energy(separation_m: f64) -> f64 {
    -PI * PI * HBAR * C / (720.0 * separation_m.powi(3))
}

/// Classical thermal energy per area of the zero-frequency term,
/// `−ζ(3) k_B T / (16π D²)` (J/m²).
pub fn thermal_energy(temperature_k: f64, separation_m: f64) -> f64 {
    -ZETA3 * K_B * temperature_k / (16.0 * PI * separation_m * separation_m)
}

/// Matsubara imaginary wavenumber `κ_n = 2πn k_B T/(ħc)` (1/m).
pub fn matsubara_kappa(n: usize, temperature_k: f64) -> f64 {
    2.0 * PI * n as f64 * K_B * temperature_k / (HBAR * C)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thermal_energy_reference_value() {
        // T = 300 K, D = 100 nm
        let e = thermal_energy(300.0, 100e-9);
        assert!((e / -9.906e-9 - 1.0).abs() < 1e-3, "{e}");
    }

    #[test]
    fn ideal_metal_sign() {
        assert!(ideal_metal_energy(1e-6) < 0.0);
    }
}
