//! Zone-folding nearest-neighbour tight binding for zigzag `(n, 0)` tubes
//! and the vertical (k-conserving) optical transitions used by the Kubo
//! interband conductivity.
//!
//! Conventions: bond length `b = 0.142 nm`, translation period
//! `a_t = √3·(√3 b) = 3b`, axial wavenumber `k ∈ [-π/a_t, π/a_t]`,
//! `c_q = cos(qπ/n)` for `q = 1 … 2n`, and
//!
//! ```text
//! f_q(k) = e^{ikb} + 2 c_q e^{-ikb/2},   E_q(k) = γ₀ |f_q(k)|
//!        = γ₀ √(1 + 4 c_q cos(k a_t/2) + 4 c_q²).
//! ```

use std::f64::consts::PI;

use super::Chirality;
use crate::units::{CC_BOND_NM, EV, E2_GAUSSIAN, HBAR, NM};
use crate::{Error, Result};

/// Translation period of a zigzag tube, nm.
pub fn zigzag_translation_nm() -> f64 {
    3.0 * CC_BOND_NM
}

fn require_zigzag(ch: Chirality) -> Result<()> {
    if !ch.is_zigzag() {
        return Err(Error::InvalidParameter(format!(
            "tight-binding subbands are implemented for zigzag (n,0) tubes only, got ({},{})",
            ch.n(),
            ch.m()
        )));
    }
    Ok(())
}

/// Conduction-band energies `E_q(k)` (eV) for `q = 1 … 2n`; the valence
/// band is `-E_q(k)`.
pub fn tb_subbands(ch: Chirality, k_per_nm: f64, hopping_ev: f64) -> Result<Vec<f64>> {
    require_zigzag(ch)?;
    let a_t = zigzag_translation_nm();
    if !(k_per_nm.abs() <= PI / a_t * (1.0 + 1e-12)) {
        return Err(Error::Domain {
            function: "tb_subbands",
            value: k_per_nm,
            reason: "k lies outside the first Brillouin zone",
        });
    }
    let n = ch.n();
    let cu = (0.5 * k_per_nm * a_t).cos();
    Ok((1..=2 * n)
        .map(|q| {
            let c = (q as f64 * PI / n as f64).cos();
            hopping_ev * (1.0 + 4.0 * c * cu + 4.0 * c * c).max(0.0).sqrt()
        })
        .collect())
}

/// `|⟨c,q,k| v_y |v,q,k⟩|` in m/s.
///
/// For the two-band Hamiltonian with off-diagonal element `γ₀ f`, the
/// interband velocity is `γ₀ |Im(f ∂_k f*)| / (ħ|f|)`, which reduces to
/// `(γ₀ b/ħ) |1 - 2c² + c cos(3kb/2)| / |f|`.
pub fn interband_velocity(c_q: f64, k_per_nm: f64, hopping_ev: f64) -> f64 {
    let b = CC_BOND_NM;
    let u = 1.5 * k_per_nm * b;
    let f = (1.0 + 4.0 * c_q * u.cos() + 4.0 * c_q * c_q).max(0.0).sqrt();
    if f == 0.0 {
        return 0.0;
    }
    hopping_ev * EV * b * NM / HBAR * (1.0 - 2.0 * c_q * c_q + c_q * u.cos()).abs() / f
}

/// One broadened vertical transition `-E → +E` at a k-sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KuboTransition {
    /// Transition energy `2E_q(k)`, eV.
    pub energy_ev: f64,
    /// Weight `w` such that the surface conductivity is
    /// `Σ w · (i/π)[1/(ħω - ΔE + iΓ) + 1/(ħω + ΔE + iΓ)]` (eV·m/s, ħω in eV).
    pub weight: f64,
}

/// Vertical transitions of a zigzag tube sampled on `k_points` midpoints of
/// the half zone `[0, π/a_t]`, Pauli-blocked below `|μ|`.
///
/// Per unit length the Kubo–Greenwood result (spin included) is
/// `Re σ_1D = e²ħ Σ_q ∫dk |v|²/ΔE · δ(ħω - ΔE)`; dividing by `2πR` gives
/// the per-surface value. Weights already include the `k → -k` doubling.
pub fn kubo_transitions(
    ch: Chirality,
    hopping_ev: f64,
    chemical_potential_ev: f64,
    k_points: usize,
) -> Result<Vec<KuboTransition>> {
    require_zigzag(ch)?;
    if k_points == 0 {
        return Err(Error::InvalidParameter("k_points must be >= 1".into()));
    }
    let n = ch.n();
    let k_max = PI / zigzag_translation_nm();
    let dk_nm = k_max / k_points as f64;
    let circumference = 2.0 * PI * ch.radius_m();
    let mu = chemical_potential_ev.abs();
    let mut out = Vec::with_capacity(2 * n as usize * k_points);
    for q in 1..=2 * n {
        let c = (q as f64 * PI / n as f64).cos();
        for j in 0..k_points {
            let k = (j as f64 + 0.5) * dk_nm;
            let e = hopping_ev * (1.0 + 4.0 * c * (1.5 * k * CC_BOND_NM).cos() + 4.0 * c * c).max(0.0).sqrt();
            if e <= mu || e == 0.0 {
                continue;
            }
            let v = interband_velocity(c, k, hopping_ev);
            let de = 2.0 * e;
            // J·m/s, converted to eV·m/s; ×2 for k < 0
            let w = E2_GAUSSIAN * HBAR * v * v / (de * EV) * (dk_nm / NM) * 2.0 / circumference;
            out.push(KuboTransition {
                energy_ev: de,
                weight: w / EV,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metallic_zigzag_has_gapless_subband() {
        let ch = Chirality::new(12, 0).unwrap();
        let e = tb_subbands(ch, 0.0, 2.7).unwrap();
        assert!(e[7].abs() < 1e-12, "q = 8: {}", e[7]);
        assert!((e[11] - 2.7).abs() < 1e-12, "q = 12: {}", e[11]);
    }

    #[test]
    fn semiconducting_zigzag_has_gap() {
        let ch = Chirality::new(13, 0).unwrap();
        let gap = tb_subbands(ch, 0.0, 2.7)
            .unwrap()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        assert!(gap > 0.1, "{gap}");
    }

    #[test]
    fn bands_are_even_in_k() {
        let ch = Chirality::new(12, 0).unwrap();
        for &k in &[0.3, 1.1, 2.0] {
            assert_eq!(tb_subbands(ch, k, 2.7).unwrap(), tb_subbands(ch, -k, 2.7).unwrap());
        }
    }

    #[test]
    fn rejects_chiral_tubes_and_out_of_zone() {
        assert!(tb_subbands(Chirality::new(10, 5).unwrap(), 0.0, 2.7).is_err());
        let ch = Chirality::new(12, 0).unwrap();
        assert!(tb_subbands(ch, 10.0, 2.7).is_err());
    }

    #[test]
    fn velocity_matches_numerical_derivative_formula() {
        // |Im(f ∂f*)|/|f| with f differentiated numerically
        let (c, k, g) = (-0.3_f64, 1.3_f64, 2.7);
        let b = CC_BOND_NM;
        let f = |k: f64| {
            num_complex::Complex64::new(0.0, k * b).exp()
                + 2.0 * c * num_complex::Complex64::new(0.0, -0.5 * k * b).exp()
        };
        let h = 1e-5;
        let df = (f(k + h) - f(k - h)) / (2.0 * h);
        let oracle = g * EV * b * NM / HBAR * (f(k) * df.conj()).im.abs() / f(k).norm() / b;
        let v = interband_velocity(c, k, g);
        assert!((v / oracle - 1.0).abs() < 1e-8, "{v} vs {oracle}");
    }

    #[test]
    fn pauli_blocking_removes_low_transitions() {
        let ch = Chirality::new(12, 0).unwrap();
        let t = kubo_transitions(ch, 2.7, 0.5, 200).unwrap();
        assert!(t.iter().all(|x| x.energy_ev > 1.0 && x.weight >= 0.0));
    }
}
