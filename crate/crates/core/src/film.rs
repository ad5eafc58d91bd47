//! In-plane surface conductivity tensor of a dilute array of aligned tubes.
//!
//! The unrotated film has its tubes along `y`:
//!
//! ```text
//! σ_yy = (2πR/ε_sΔ) σ_intra F_T + (ε_b d/2π) ξ K σ_inter/(ξ + K σ_inter)
//! σ_xx = d ξ (ε_b - ε_s)/4π
//! ```
//!
//! on the imaginary axis `ω = iξ` (Gaussian units, m/s), with the
//! collective coupling `K(k_y)` built from the nonlocal plasma frequency.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numerics::bessel_i0k0;
use crate::swcnt::{
    thermal_intra_factor, Chirality, ElectronicParams, InterbandModel, InterbandResponse,
};
use crate::units::{to_reduced, ALPHA, C, E2_GAUSSIAN, M_E, NM};
use crate::{Error, Result};

/// Continuation of the collective interband term to the imaginary axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollectiveConvention {
    /// `ξKσ/(ξ + Kσ)`: positive and pole-free for `ξ > 0`.
    #[default]
    Passive,
    /// `ξKσ/(ξ - Kσ)`, the printed `iω → -ξ` substitution. Evaluation fails
    /// with [`Error::CollectivePole`] wherever `ξ ≤ Kσ`.
    Literal,
}

/// Geometry, dielectric environment and electronic parameters of one film.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilmSpec {
    pub chirality: Chirality,
    /// Intertube spacing Δ in units of the tube radius.
    #[serde(rename = "Delta_over_R")]
    pub delta_over_r: f64,
    /// Film thickness in nm; `None` means `2R`.
    #[serde(default, rename = "thickness_nm")]
    pub thickness_nm: Option<f64>,
    #[serde(default = "default_eps_b")]
    pub eps_b: f64,
    #[serde(default = "default_eps_s")]
    pub eps_s: f64,
    #[serde(default)]
    pub electronic: ElectronicParams,
    #[serde(default)]
    pub interband: InterbandModel,
    #[serde(default)]
    pub collective: CollectiveConvention,
}

fn default_eps_b() -> f64 {
    2.0
}

fn default_eps_s() -> f64 {
    1.0
}

impl FilmSpec {
    /// Defaults: `d = 2R`, `ε_b = 2`, `ε_s = 1`, tight-binding interband.
    pub fn new(chirality: Chirality, delta_over_r: f64) -> Self {
        Self {
            chirality,
            delta_over_r,
            thickness_nm: None,
            eps_b: default_eps_b(),
            eps_s: default_eps_s(),
            electronic: ElectronicParams::default(),
            interband: InterbandModel::default(),
            collective: CollectiveConvention::default(),
        }
    }

    pub fn radius_nm(&self) -> f64 {
        self.chirality.radius_nm()
    }

    pub fn delta_nm(&self) -> f64 {
        self.delta_over_r * self.radius_nm()
    }

    pub fn thickness(&self) -> f64 {
        self.thickness_nm.unwrap_or(2.0 * self.radius_nm())
    }

    /// `f_CN = πR²/(Δd)`.
    pub fn volume_fraction(&self) -> f64 {
        let r = self.radius_nm();
        PI * r * r / (self.delta_nm() * self.thickness())
    }

    /// `Δ - 2R ≥ 5 ε_b d/(2ε_s)`.
    pub fn is_dilute(&self) -> bool {
        self.delta_nm() - 2.0 * self.radius_nm() >= 5.0 * self.eps_b * self.thickness() / (2.0 * self.eps_s)
    }

    pub fn validate(&self) -> Result<()> {
        self.electronic.validate()?;
        self.interband.validate()?;
        if !(self.delta_over_r > 2.0) || !self.delta_over_r.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Delta_over_R must exceed 2 (tubes may not overlap), got {}",
                self.delta_over_r
            )));
        }
        if let Some(d) = self.thickness_nm {
            if !(d > 0.0) {
                return Err(Error::InvalidParameter("thickness_nm must be > 0".into()));
            }
        }
        if !(self.eps_b > 0.0) || !(self.eps_s > 0.0) {
            return Err(Error::InvalidParameter("eps_b and eps_s must be > 0".into()));
        }
        let f = self.volume_fraction();
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "volume fraction f_CN = {f} must lie in (0, 1)"
            )));
        }
        Ok(())
    }
}

/// Collective coupling at one `k_y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveCoupling {
    /// Nonlocal plasma frequency, rad/s.
    pub plasma_frequency: f64,
    /// `K(k_y)`, 1/m (so that `Kσ` is a rate).
    pub k: f64,
}

/// Intraband and collective contributions to `σ_yy` (Gaussian, m/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaYyParts {
    pub intraband: f64,
    pub collective: f64,
}

impl SigmaYyParts {
    pub fn total(&self) -> f64 {
        self.intraband + self.collective
    }
}

/// A film ready for evaluation: spec plus derived constants and the shared
/// interband response.
#[derive(Debug, Clone)]
pub struct ArrayFilm {
    spec: FilmSpec,
    radius: f64,
    thickness: f64,
    delta: f64,
    tau: f64,
    interband: Arc<InterbandResponse>,
}

impl ArrayFilm {
    pub fn new(spec: FilmSpec) -> Result<Self> {
        spec.validate()?;
        let interband = InterbandResponse::new(&spec.interband, spec.chirality, &spec.electronic)?;
        Self::with_interband(spec, Arc::new(interband))
    }

    /// Builds a film around an existing interband response (e.g. shared by
    /// several films of the same tube).
    pub fn with_interband(spec: FilmSpec, interband: Arc<InterbandResponse>) -> Result<Self> {
        spec.validate()?;
        if !spec.is_dilute() {
            log::warn!(
                "film with Delta = {:.3} nm is outside the dilute regime: \
                 Delta - 2R = {:.3} nm < 5 eps_b d/(2 eps_s) = {:.3} nm",
                spec.delta_nm(),
                spec.delta_nm() - 2.0 * spec.radius_nm(),
                5.0 * spec.eps_b * spec.thickness() / (2.0 * spec.eps_s)
            );
        }
        Ok(Self {
            radius: spec.radius_nm() * NM,
            thickness: spec.thickness() * NM,
            delta: spec.delta_nm() * NM,
            tau: spec.electronic.relaxation_time_s(),
            interband,
            spec,
        })
    }

    pub fn spec(&self) -> &FilmSpec {
        &self.spec
    }

    pub fn interband(&self) -> &Arc<InterbandResponse> {
        &self.interband
    }

    /// Dimensionless nonlocal factor `2xI₀(x)K₀(x)/(1 + 2ε_s/(ε_b k_y d))`,
    /// `x = k_yR`.
    fn nonlocal_factor(&self, k_y: f64) -> Result<f64> {
        if k_y == 0.0 {
            return Ok(0.0);
        }
        let x = k_y * self.radius;
        let ekd = self.spec.eps_b * k_y * self.thickness;
        Ok(2.0 * x * bessel_i0k0(x)? * ekd / (ekd + 2.0 * self.spec.eps_s))
    }

    /// `ω_p(k_y)`, rad/s.
    pub fn plasma_frequency(&self, k_y: f64) -> Result<f64> {
        check_k(k_y)?;
        let ep = &self.spec.electronic;
        let m = ep.effective_mass_me * M_E;
        let w2 = 4.0 * PI * E2_GAUSSIAN * ep.surface_density_per_m2 / (m * self.spec.eps_b * self.thickness)
            * self.nonlocal_factor(k_y)?;
        Ok(w2.sqrt())
    }

    /// `K(k_y) = f_CN m* ω_p² d/(e² N_2D R)`. The effective mass and the
    /// density cancel, leaving `f_CN (4π/ε_b R) · nonlocal factor`.
    pub fn coupling_k(&self, k_y: f64) -> Result<f64> {
        check_k(k_y)?;
        Ok(self.spec.volume_fraction() * 4.0 * PI / (self.spec.eps_b * self.radius)
            * self.nonlocal_factor(k_y)?)
    }

    pub fn collective_coupling(&self, k_y: f64) -> Result<CollectiveCoupling> {
        Ok(CollectiveCoupling {
            plasma_frequency: self.plasma_frequency(k_y)?,
            k: self.coupling_k(k_y)?,
        })
    }

    /// Intraband prefactor `(2πR/ε_sΔ)(2αc v_F/π²R)`.
    fn intra_prefactor(&self) -> f64 {
        let vf = self.spec.electronic.fermi_velocity_m_per_s;
        2.0 * PI * self.radius / (self.spec.eps_s * self.delta) * 2.0 * ALPHA * C * vf
            / (PI * PI * self.radius)
    }

    fn thermal_factor(&self, k_y: f64, temperature_k: f64) -> Result<f64> {
        let ep = &self.spec.electronic;
        thermal_intra_factor(k_y, temperature_k, ep.chemical_potential_ev, ep.fermi_velocity_m_per_s)
    }

    /// Both contributions to `σ_yy(k_y, iξ)` at temperature `T` (the
    /// temperature enters the intraband term only).
    pub fn sigma_yy_parts(&self, xi: f64, k_y: f64, temperature_k: f64) -> Result<SigmaYyParts> {
        self.slice(xi, temperature_k)?.sigma_yy_parts(k_y)
    }

    /// `σ_yy^array(k_y, iξ)`, Gaussian (m/s).
    pub fn sigma_yy(&self, xi: f64, k_y: f64, temperature_k: f64) -> Result<f64> {
        Ok(self.sigma_yy_parts(xi, k_y, temperature_k)?.total())
    }

    /// `σ_xx^array(iξ) = d ξ (ε_b - ε_s)/4π`, Gaussian (m/s).
    pub fn sigma_xx(&self, xi: f64) -> Result<f64> {
        check_xi(xi)?;
        Ok(self.thickness * xi * (self.spec.eps_b - self.spec.eps_s) / (4.0 * PI))
    }

    /// Complex `σ_yy^array(k_y, ω)` on the real axis (`e^{-iωt}`).
    pub fn sigma_yy_real_axis(&self, omega: f64, k_y: f64, temperature_k: f64) -> Result<Complex64> {
        check_k(k_y)?;
        let vf = self.spec.electronic.fermi_velocity_m_per_s;
        let g = Complex64::new(1.0 / self.tau, -omega);
        let intra = self.intra_prefactor() * g / (g * g + (vf * k_y).powi(2))
            * self.thermal_factor(k_y, temperature_k)?;
        let ks = self.coupling_k(k_y)? * self.interband.real_axis(omega);
        let minus_iw = Complex64::new(0.0, -omega);
        let collective = match self.spec.collective {
            CollectiveConvention::Passive => minus_iw * ks / (minus_iw + ks),
            CollectiveConvention::Literal => -minus_iw * ks / (-minus_iw + ks),
        };
        let collective = if collective.is_finite() { collective } else { Complex64::new(0.0, 0.0) };
        Ok(intra + self.spec.eps_b * self.thickness / (2.0 * PI) * collective)
    }

    /// `σ_xx^array(ω) = -d iω(ε_b - ε_s)/4π`.
    pub fn sigma_xx_real_axis(&self, omega: f64) -> Complex64 {
        Complex64::new(0.0, -self.thickness * omega * (self.spec.eps_b - self.spec.eps_s) / (4.0 * PI))
    }

    /// Unrotated reduced tensor at `(k_y, iξ)`.
    pub fn tensor(&self, xi: f64, k_y: f64, temperature_k: f64) -> Result<ConductivityTensor> {
        let slice = self.slice(xi, temperature_k)?;
        Ok(ConductivityTensor::diagonal(slice.s_xx, slice.s_yy(k_y)?, k_y, xi))
    }

    /// Precomputes everything that depends on `ξ` and `T` only.
    pub fn slice(&self, xi: f64, temperature_k: f64) -> Result<FrequencySlice<'_>> {
        check_xi(xi)?;
        if !(temperature_k >= 0.0) {
            return Err(Error::InvalidParameter("temperature must be >= 0".into()));
        }
        Ok(FrequencySlice {
            film: self,
            xi,
            temperature_k,
            s_xx: to_reduced(self.sigma_xx(xi)?),
            sigma_inter: self.interband.imaginary_axis(xi)?,
            rate: xi + 1.0 / self.tau,
            intra_prefactor: self.intra_prefactor(),
            min_step: 1e-5 * ((xi + 1.0 / self.tau) / self.spec.electronic.fermi_velocity_m_per_s)
                .min(1.0 / (self.spec.radius_nm() * NM)),
        })
    }

    /// Scans a `(ξ, k_y)` grid and reports the first pole of the literal
    /// collective continuation, if any. Always `Ok` for the passive one.
    pub fn check_collective_convention(&self, xi_grid: &[f64], k_grid: &[f64]) -> Result<()> {
        if self.spec.collective == CollectiveConvention::Passive {
            return Ok(());
        }
        for &k in k_grid {
            let kk = self.coupling_k(k)?;
            let mut prev: Option<f64> = None;
            for &xi in xi_grid {
                let den = xi - kk * self.interband.imaginary_axis(xi)?;
                if let Some(p) = prev {
                    if p.signum() != den.signum() {
                        return Err(Error::CollectivePole { xi });
                    }
                }
                prev = Some(den);
            }
        }
        Ok(())
    }
}

fn check_k(k_y: f64) -> Result<()> {
    if !(k_y >= 0.0) || !k_y.is_finite() {
        return Err(Error::Domain {
            function: "film conductivity",
            value: k_y,
            reason: "k_y must be finite and >= 0",
        });
    }
    Ok(())
}

fn check_xi(xi: f64) -> Result<()> {
    if !(xi >= 0.0) || !xi.is_finite() {
        return Err(Error::Domain {
            function: "film conductivity",
            value: xi,
            reason: "imaginary frequency must be finite and >= 0",
        });
    }
    Ok(())
}

/// `ξ`- and `T`-dependent pieces of a film's conductivity, so that only
/// the `k_y` dependence is evaluated inside the momentum integrals.
#[derive(Debug, Clone, Copy)]
pub struct FrequencySlice<'a> {
    film: &'a ArrayFilm,
    xi: f64,
    temperature_k: f64,
    /// Reduced `2πσ_xx/c`.
    s_xx: f64,
    /// `σ_inter(iξ)`, m/s.
    sigma_inter: f64,
    /// `ξ + 1/τ`.
    rate: f64,
    intra_prefactor: f64,
    /// Smallest difference step for `ds_yy_dk`, well below the scales
    /// `(ξ + 1/τ)/v_F` and `1/R` on which `σ_yy` varies.
    min_step: f64,
}

impl FrequencySlice<'_> {
    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn s_xx(&self) -> f64 {
        self.s_xx
    }

    pub fn sigma_yy_parts(&self, k_y: f64) -> Result<SigmaYyParts> {
        check_k(k_y)?;
        let film = self.film;
        let vk = film.spec.electronic.fermi_velocity_m_per_s * k_y;
        let intraband = self.intra_prefactor * self.rate / (self.rate * self.rate + vk * vk)
            * film.thermal_factor(k_y, self.temperature_k)?;
        let collective = if self.sigma_inter == 0.0 || self.xi == 0.0 {
            0.0
        } else {
            let ks = film.coupling_k(k_y)? * self.sigma_inter;
            let frac = match film.spec.collective {
                CollectiveConvention::Passive => self.xi * ks / (self.xi + ks),
                CollectiveConvention::Literal => {
                    let den = self.xi - ks;
                    if den <= 0.0 {
                        return Err(Error::CollectivePole { xi: self.xi });
                    }
                    self.xi * ks / den
                }
            };
            film.spec.eps_b * film.thickness / (2.0 * PI) * frac
        };
        Ok(SigmaYyParts {
            intraband,
            collective,
        })
    }

    /// Reduced `2πσ_yy/c` at `k_y`.
    pub fn s_yy(&self, k_y: f64) -> Result<f64> {
        Ok(to_reduced(self.sigma_yy_parts(k_y)?.total()))
    }

    /// `∂(2πσ_yy/c)/∂k_y` by a five-point difference with relative step
    /// `1e-3`, floored so that rounding noise stays small as `k_y → 0`.
    /// `σ_yy` depends on `|k_y|`, so the stencil may straddle zero.
    pub fn ds_yy_dk(&self, k_y: f64) -> Result<f64> {
        if k_y == 0.0 {
            return Ok(0.0);
        }
        let h = (1e-3 * k_y.abs()).max(self.min_step);
        let f = |k: f64| self.s_yy(k.abs());
        Ok((f(k_y - 2.0 * h)? - 8.0 * f(k_y - h)? + 8.0 * f(k_y + h)? - f(k_y + 2.0 * h)?) / (12.0 * h))
    }
}

/// 2×2 reduced surface conductivity `2πσ/c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConductivityTensor {
    pub xx: f64,
    pub xy: f64,
    pub yx: f64,
    pub yy: f64,
    /// Evaluation point.
    pub k_y: f64,
    pub xi: f64,
    /// Rotation applied so far, radians.
    pub phi: f64,
}

impl ConductivityTensor {
    pub fn diagonal(xx: f64, yy: f64, k_y: f64, xi: f64) -> Self {
        Self {
            xx,
            xy: 0.0,
            yx: 0.0,
            yy,
            k_y,
            xi,
            phi: 0.0,
        }
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.yx
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    /// `σ^φ = R⁻¹σR` with `R = [[cos φ, -sin φ], [sin φ, cos φ]]`.
    pub fn rotate(&self, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        // σR
        let (a, b) = (self.xx * c + self.xy * s, -self.xx * s + self.xy * c);
        let (d, e) = (self.yx * c + self.yy * s, -self.yx * s + self.yy * c);
        Self {
            xx: c * a + s * d,
            xy: c * b + s * e,
            yx: -s * a + c * d,
            yy: -s * b + c * e,
            phi: self.phi + phi,
            ..*self
        }
    }

    /// `dσ^φ/dφ` of a diagonal tensor rotated by `φ`:
    /// `(Δ sin 2φ, Δ cos 2φ, Δ cos 2φ, -Δ sin 2φ)` with `Δ = σ_yy - σ_xx`.
    pub fn rotation_derivative(xx: f64, yy: f64, phi: f64) -> [f64; 4] {
        let d = yy - xx;
        let (s2, c2) = (2.0 * phi).sin_cos();
        [d * s2, d * c2, d * c2, -d * s2]
    }
}

/// Free-function form of [`ConductivityTensor::rotate`].
pub fn rotate_tensor(t: &ConductivityTensor, phi: f64) -> ConductivityTensor {
    t.rotate(phi)
}

/// A conducting sheet as seen by the Lifshitz evaluators.
#[derive(Debug, Clone)]
pub enum Sheet {
    Array(Arc<ArrayFilm>),
    /// Frequency- and momentum-independent reduced conductivities.
    Uniform { s_xx: f64, s_yy: f64 },
}

/// Reduced conductivity used as a perfect-conductor surrogate.
pub const PERFECT_CONDUCTOR_SURROGATE: f64 = 1e6;

impl Sheet {
    pub fn array(spec: FilmSpec) -> Result<Self> {
        Ok(Sheet::Array(Arc::new(ArrayFilm::new(spec)?)))
    }

    pub fn perfect_conductor() -> Self {
        Sheet::Uniform {
            s_xx: PERFECT_CONDUCTOR_SURROGATE,
            s_yy: PERFECT_CONDUCTOR_SURROGATE,
        }
    }

    pub fn slice(&self, xi: f64, temperature_k: f64) -> Result<SheetSlice<'_>> {
        Ok(match self {
            Sheet::Array(f) => SheetSlice::Array(f.slice(xi, temperature_k)?),
            Sheet::Uniform { s_xx, s_yy } => SheetSlice::Uniform {
                s_xx: *s_xx,
                s_yy: *s_yy,
            },
        })
    }

    pub fn film(&self) -> Option<&ArrayFilm> {
        match self {
            Sheet::Array(f) => Some(f),
            Sheet::Uniform { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum SheetSlice<'a> {
    Array(FrequencySlice<'a>),
    Uniform { s_xx: f64, s_yy: f64 },
}

impl SheetSlice<'_> {
    pub fn s_xx(&self) -> f64 {
        match self {
            SheetSlice::Array(s) => s.s_xx(),
            SheetSlice::Uniform { s_xx, .. } => *s_xx,
        }
    }

    pub fn s_yy(&self, k_y: f64) -> Result<f64> {
        match self {
            SheetSlice::Array(s) => s.s_yy(k_y),
            SheetSlice::Uniform { s_yy, .. } => Ok(*s_yy),
        }
    }

    pub fn ds_yy_dk(&self, k_y: f64) -> Result<f64> {
        match self {
            SheetSlice::Array(s) => s.ds_yy_dk(k_y),
            SheetSlice::Uniform { .. } => Ok(0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{bessel_i0, bessel_k0};
    use crate::swcnt::Oscillator;
    use crate::units::{ev_to_rad_per_s, HBAR};

    fn spec(delta: f64) -> FilmSpec {
        let mut s = FilmSpec::new(Chirality::new(12, 0).unwrap(), delta);
        s.interband = InterbandModel::LorentzOscillators {
            oscillators: vec![Oscillator {
                center_ev: 1.8,
                strength: 2.0,
                width_ev: 0.1,
            }],
        };
        s
    }

    #[test]
    fn plasma_frequency_reference_point() {
        let f = ArrayFilm::new(spec(10.0)).unwrap();
        let r = f.spec().radius_nm() * NM;
        let d = 2.0 * r;
        let k = 1.0 / r;
        let ep = ElectronicParams::default();
        let e2 = ALPHA * HBAR * C;
        let i0k0 = bessel_i0(1.0).unwrap() * bessel_k0(1.0).unwrap();
        assert!((i0k0 - 1.2660658777520084 * 0.4210244382407083).abs() < 1e-14);
        let oracle = (4.0 * PI * e2 * ep.surface_density_per_m2 / (ep.effective_mass_me * M_E * 2.0 * d)
            * 2.0
            * i0k0
            / (1.0 + 2.0 * 1.0 / (2.0 * k * d)))
            .sqrt();
        let wp = f.plasma_frequency(k).unwrap();
        assert!((wp / oracle - 1.0).abs() < 1e-13, "{wp} {oracle}");
        // chained K formula
        let fcn = PI * r * r / (10.0 * r * d);
        let k_oracle = fcn * ep.effective_mass_me * M_E * oracle * oracle * d / (e2 * ep.surface_density_per_m2 * r);
        assert!((f.coupling_k(k).unwrap() / k_oracle - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plasma_frequency_limits_and_scaling() {
        let f = ArrayFilm::new(spec(10.0)).unwrap();
        assert_eq!(f.plasma_frequency(0.0).unwrap(), 0.0);
        assert!(f.plasma_frequency(1e2).unwrap() < 1e-3 * f.plasma_frequency(1e9).unwrap());
        let mut s4 = spec(10.0);
        s4.electronic.surface_density_per_m2 *= 4.0;
        let f4 = ArrayFilm::new(s4).unwrap();
        let ratio = f4.plasma_frequency(1e9).unwrap() / f.plasma_frequency(1e9).unwrap();
        assert!((ratio - 2.0).abs() < 1e-12);
        assert_eq!(f.coupling_k(0.0).unwrap(), 0.0);
    }

    #[test]
    fn coupling_is_linear_in_volume_fraction() {
        let a = ArrayFilm::new(spec(20.0)).unwrap();
        let b = ArrayFilm::new(spec(10.0)).unwrap();
        let k = 3e8;
        assert!((b.coupling_k(k).unwrap() / a.coupling_k(k).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(a.plasma_frequency(k).unwrap(), b.plasma_frequency(k).unwrap());
    }

    #[test]
    fn sigma_xx_reference_value() {
        let mut s = spec(10.0);
        s.thickness_nm = Some(0.94);
        let f = ArrayFilm::new(s).unwrap();
        let xi = ev_to_rad_per_s(1.0);
        let oracle = 0.94e-9 * xi * (2.0 - 1.0) / (4.0 * PI);
        assert!((f.sigma_xx(xi).unwrap() / oracle - 1.0).abs() < 1e-14);
        assert_eq!(f.sigma_xx(0.0).unwrap(), 0.0);
        let mut m = spec(10.0);
        m.eps_b = 1.0;
        assert_eq!(ArrayFilm::new(m).unwrap().sigma_xx(xi).unwrap(), 0.0);
    }

    #[test]
    fn sigma_yy_positive_and_ordered_by_spacing() {
        let films: Vec<ArrayFilm> = [10.0, 20.0, 50.0].iter().map(|&d| ArrayFilm::new(spec(d)).unwrap()).collect();
        let k = 1.0 / (films[0].spec().radius_nm() * NM);
        for i in 0..30 {
            let xi = 1e11 * 10f64.powf(i as f64 / 5.0);
            let v: Vec<f64> = films.iter().map(|f| f.sigma_yy(xi, k, 0.0).unwrap()).collect();
            assert!(v[0] > v[1] && v[1] > v[2] && v[2] > 0.0, "{xi}: {v:?}");
        }
    }

    #[test]
    fn sigma_yy_vanishes_at_large_xi_and_dilution() {
        let f = ArrayFilm::new(spec(10.0)).unwrap();
        let k = 1e9;
        let small = f.sigma_yy(1e21, k, 0.0).unwrap();
        assert!(small < 1e-4 * f.sigma_yy(1e13, k, 0.0).unwrap());
        let d1 = ArrayFilm::new(spec(1e3)).unwrap().sigma_yy_parts(1e14, k, 0.0).unwrap();
        let d2 = ArrayFilm::new(spec(1e4)).unwrap().sigma_yy_parts(1e14, k, 0.0).unwrap();
        assert!((d1.intraband / d2.intraband - 10.0).abs() < 1e-9);
        assert!(d2.collective < d1.collective);
    }

    #[test]
    fn literal_convention_reports_pole() {
        let mut s = spec(10.0);
        s.collective = CollectiveConvention::Literal;
        let f = ArrayFilm::new(s).unwrap();
        let xis: Vec<f64> = (0..80).map(|i| 1e10 * 10f64.powf(i as f64 / 10.0)).collect();
        let ks = [1e9, 2e9];
        let scan = f.check_collective_convention(&xis, &ks);
        let passive = ArrayFilm::new(spec(10.0)).unwrap();
        assert!(passive.check_collective_convention(&xis, &ks).is_ok());
        if let Err(Error::CollectivePole { xi }) = scan {
            assert!(f.sigma_yy(xi * 0.5, 1e9, 0.0).is_err() || f.sigma_yy(xi, 1e9, 0.0).is_err());
        }
    }

    #[test]
    fn real_axis_intraband_matches_imaginary_axis_continuation() {
        let f = ArrayFilm::new(spec(10.0)).unwrap();
        let w = 1e13;
        let s = f.sigma_yy_real_axis(w, 1e8, 0.0).unwrap();
        assert!(s.re > 0.0);
        let xx = f.sigma_xx_real_axis(w);
        assert!(xx.re == 0.0 && xx.im < 0.0);
    }

    #[test]
    fn rotation_examples() {
        let t = ConductivityTensor::diagonal(0.3, 2.0, 0.0, 0.0);
        assert_eq!(t.rotate(0.0).xx, 0.3);
        let q = t.rotate(PI / 2.0);
        assert!((q.xx - 2.0).abs() < 1e-15 && (q.yy - 0.3).abs() < 1e-15);
        assert!(q.xy.abs() < 1e-15 && q.yx.abs() < 1e-15);
        let s = 1.7;
        let h = ConductivityTensor::diagonal(0.0, s, 0.0, 0.0).rotate(PI / 4.0);
        for v in [h.xx, h.xy, h.yx, h.yy] {
            assert!((v - s / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rotation_invariants() {
        let t = ConductivityTensor::diagonal(0.37, 4.2, 0.0, 0.0);
        for i in 0..50 {
            let phi = -3.0 + 0.13 * i as f64;
            let r = t.rotate(phi);
            assert!((r.det() / t.det() - 1.0).abs() < 1e-12);
            assert!((r.trace() / t.trace() - 1.0).abs() < 1e-12);
            let p = t.rotate(phi + PI);
            assert!((p.xx - r.xx).abs() < 1e-12 && (p.xy - r.xy).abs() < 1e-12);
            let m = t.rotate(-phi);
            assert!((m.xy + r.xy).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_derivative_matches_difference() {
        let (xx, yy) = (0.2, 3.0);
        let phi = 0.7;
        let d = ConductivityTensor::rotation_derivative(xx, yy, phi);
        let h = 1e-6;
        let p = ConductivityTensor::diagonal(xx, yy, 0.0, 0.0).rotate(phi + h);
        let m = ConductivityTensor::diagonal(xx, yy, 0.0, 0.0).rotate(phi - h);
        let fd = [(p.xx - m.xx) / (2.0 * h), (p.xy - m.xy) / (2.0 * h), (p.yx - m.yx) / (2.0 * h), (p.yy - m.yy) / (2.0 * h)];
        for i in 0..4 {
            assert!((d[i] - fd[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn dilute_threshold() {
        let mut s = spec(50.0);
        assert!(s.is_dilute());
        // Δ - 2R = 5 ε_b d/(2ε_s) exactly at Δ/R = 2 + 5 ε_b/ε_s (d = 2R)
        s.delta_over_r = 2.0 + 5.0 * s.eps_b / s.eps_s + 1e-9;
        assert!(s.is_dilute());
        s.delta_over_r -= 2e-9;
        assert!(!s.is_dilute());
        assert!(FilmSpec::new(Chirality::new(12, 0).unwrap(), 1.5).validate().is_err());
    }

    #[test]
    fn slice_derivative_matches_direct_difference() {
        let f = ArrayFilm::new(spec(10.0)).unwrap();
        let sl = f.slice(3e14, 300.0).unwrap();
        let k = 4e8;
        let h = 1e3;
        let fd = (sl.s_yy(k + h).unwrap() - sl.s_yy(k - h).unwrap()) / (2.0 * h);
        let d = sl.ds_yy_dk(k).unwrap();
        assert!((d / fd - 1.0).abs() < 1e-5, "{d} {fd}");
    }
}
