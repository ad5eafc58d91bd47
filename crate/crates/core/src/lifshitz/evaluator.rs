use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::fresnel::{fresnel_with_derivative, log_det_one_minus, torque_trace, Mat2};
use crate::error::EvalContext;
use crate::film::{ConductivityTensor, Sheet, SheetSlice};
use crate::numerics::{
    matsubara_sum, try_integrate_polar_2d, try_integrate_semi_infinite, AngularSymmetry,
    MatsubaraSpec, PolarOptions, QuadratureSpec, ToleranceReference,
};
use crate::units::{ideal_metal_energy, thermal_energy, C, HBAR, NM};
use crate::{Error, Result};

const TORQUE_ANGULAR_TOLERANCE: f64 = 1e-8;

/// How the frequency sum is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Finite-temperature Matsubara sum.
    Matsubara,
    /// `T → 0`: the sum becomes `(ħc/2π)∫dκ`.
    Quantum,
    /// The halved `n = 0` term alone.
    Thermal,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Matsubara => "matsubara",
            Mode::Quantum => "quantum",
            Mode::Thermal => "thermal",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matsubara" => Ok(Mode::Matsubara),
            "quantum" | "quantum_limit" => Ok(Mode::Quantum),
            "thermal" | "thermal_n0" => Ok(Mode::Thermal),
            other => Err(Error::InvalidParameter(format!(
                "unknown mode '{other}' (expected matsubara, quantum or thermal)"
            ))),
        }
    }
}

/// Reflection matrices used for the `n = 0` term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroFrequencyBranch {
    /// `R(κ = 0) = diag(0, 1)` for both films, independent of `φ`.
    #[default]
    Stated,
    /// Linear extrapolation of the sheet formula from `κ = 10⁻⁴k⊥` and
    /// `κ = 5·10⁻⁵k⊥`.
    NumericLimit,
}

/// In-plane axes in which the sheet tensors enter the Fresnel matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FresnelFrame {
    /// Film 1's axes for every wave vector.
    #[default]
    FilmAxes,
    /// Axes with `x̂ ∥ k⊥`, i.e. both tensors rotated by the azimuth `θ` as
    /// well. The Fresnel matrix is then rotation covariant.
    WaveVector,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifshitzOptions {
    /// Radial (and, in quantum mode, frequency) quadrature.
    pub quadrature: QuadratureSpec,
    /// Relative tolerance of the azimuthal integrals.
    pub angular_tolerance: f64,
    /// Matsubara tail tolerance relative to the partial sum.
    pub tail_tolerance: f64,
    pub max_terms: usize,
    /// Never truncate the Matsubara sum before `κ_n D` exceeds this.
    pub min_kappa_d: f64,
    pub zero_frequency: ZeroFrequencyBranch,
    pub frame: FresnelFrame,
}

impl Default for LifshitzOptions {
    fn default() -> Self {
        Self {
            quadrature: QuadratureSpec::default(),
            angular_tolerance: 1e-9,
            tail_tolerance: 1e-8,
            max_terms: 1_000_000,
            min_kappa_d: 20.0,
            zero_frequency: ZeroFrequencyBranch::Stated,
            frame: FresnelFrame::FilmAxes,
        }
    }
}

impl LifshitzOptions {
    /// Sets the radial and angular relative tolerances together.
    pub fn with_tolerance(mut self, rel: f64) -> Self {
        self.quadrature.relative_tolerance = rel;
        self.angular_tolerance = (rel * 1e-2).max(1e-13);
        self
    }
}

/// Inputs of one evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CasimirPoint {
    pub separation_nm: f64,
    pub angle_rad: f64,
    pub temperature_k: f64,
    pub mode: Mode,
}

impl CasimirPoint {
    pub fn new(separation_nm: f64, angle_rad: f64, temperature_k: f64, mode: Mode) -> Self {
        Self {
            separation_nm,
            angle_rad,
            temperature_k,
            mode,
        }
    }

    /// `E_M = -π²ħc/(720 D³)`, J/m².
    pub fn e_m(&self) -> f64 {
        ideal_metal_energy(self.separation_nm * NM)
    }

    /// `E_T = -ζ(3) k_B T/(16π D²)`, J/m².
    pub fn e_t(&self) -> f64 {
        thermal_energy(self.temperature_k, self.separation_nm * NM)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.separation_nm > 0.0) || !self.separation_nm.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "separation must be finite and > 0, got {} nm",
                self.separation_nm
            )));
        }
        if !self.angle_rad.is_finite() {
            return Err(Error::InvalidParameter("angle must be finite".into()));
        }
        if !(self.temperature_k >= 0.0) || !self.temperature_k.is_finite() {
            return Err(Error::InvalidParameter("temperature must be finite and >= 0".into()));
        }
        if self.mode != Mode::Quantum && self.temperature_k == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "{} mode needs T > 0 (use quantum mode for T = 0)",
                self.mode
            )));
        }
        Ok(())
    }

    fn context(&self) -> EvalContext {
        EvalContext {
            separation_nm: Some(self.separation_nm),
            angle_rad: Some(self.angle_rad),
            temperature_k: Some(self.temperature_k),
            ..Default::default()
        }
    }
}

/// A summed or integrated quantity and the number of frequency terms (or
/// frequency-integrand evaluations in quantum mode) it took.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub n_terms: usize,
}

/// Energy and torque at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CasimirResult {
    pub point: CasimirPoint,
    /// J/m².
    pub energy: f64,
    /// N·m/m².
    pub torque: f64,
    pub n_terms: usize,
}

impl CasimirResult {
    pub fn energy_over_em(&self) -> f64 {
        self.energy / self.point.e_m()
    }

    pub fn torque_over_em(&self) -> f64 {
        self.torque / self.point.e_m()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Quantity {
    Energy,
    Torque,
}

/// Discrepancy between the stated and the numerically extrapolated
/// zero-frequency reflection matrices at one wave vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroFrequencyReport {
    pub stated: Mat2,
    pub extrapolated: Mat2,
    pub max_abs_difference: f64,
}

/// Two sheets facing each other plus the numerical options.
#[derive(Debug, Clone)]
pub struct FilmPair {
    pub first: Sheet,
    pub second: Sheet,
    pub options: LifshitzOptions,
}

impl FilmPair {
    pub fn new(first: Sheet, second: Sheet) -> Self {
        Self {
            first,
            second,
            options: LifshitzOptions::default(),
        }
    }

    pub fn identical(sheet: Sheet) -> Self {
        Self::new(sheet.clone(), sheet)
    }

    pub fn with_options(mut self, options: LifshitzOptions) -> Self {
        self.options = options;
        self
    }

    pub fn energy(&self, pt: &CasimirPoint) -> Result<Evaluation> {
        self.evaluate_quantity(pt, Quantity::Energy)
    }

    pub fn torque(&self, pt: &CasimirPoint) -> Result<Evaluation> {
        self.evaluate_quantity(pt, Quantity::Torque)
    }

    pub fn evaluate(&self, pt: &CasimirPoint) -> Result<CasimirResult> {
        let e = self.energy(pt)?;
        let t = self.torque(pt)?;
        Ok(CasimirResult {
            point: *pt,
            energy: e.value,
            torque: t.value,
            n_terms: e.n_terms.max(t.n_terms),
        })
    }

    fn evaluate_quantity(&self, pt: &CasimirPoint, which: Quantity) -> Result<Evaluation> {
        pt.validate()?;
        let ctx = pt.context();
        let d = pt.separation_nm * NM;
        let phi = pt.angle_rad;
        if which == Quantity::Torque && on_symmetry_axis(phi) {
            // E(φ) = E(-φ) = E(π - φ) for any pair of such sheets.
            return Ok(Evaluation {
                value: 0.0,
                n_terms: 0,
            });
        }
        match pt.mode {
            Mode::Thermal => {
                let t0 = self.zero_frequency_term(d, phi, pt.temperature_k, which).map_err(|e| e.at(ctx))?;
                Ok(Evaluation {
                    value: 0.5 * crate::units::K_B * pt.temperature_k * t0,
                    n_terms: 1,
                })
            }
            Mode::Matsubara => self.matsubara(d, phi, pt.temperature_k, which).map_err(|e| e.at(ctx)),
            Mode::Quantum => self.quantum(d, phi, which).map_err(|e| e.at(ctx)),
        }
    }

    fn matsubara(&self, d: f64, phi: f64, temperature_k: f64, which: Quantity) -> Result<Evaluation> {
        let mut spec = MatsubaraSpec::new(temperature_k);
        spec.tail_tolerance = self.options.tail_tolerance;
        spec.max_terms = self.options.max_terms;
        let kappa1 = spec.kappa(1);
        spec.min_terms = ((self.options.min_kappa_d / (kappa1 * d)).floor() as usize + 2).min(spec.max_terms);
        // Running magnitude of the sum, used as an absolute floor so that
        // negligible far-tail terms are not resolved to full relative accuracy.
        let mut running = 0.0f64;
        let sum = matsubara_sum(
            |n| {
                let term = if n == 0 {
                    self.zero_frequency_term(d, phi, temperature_k, which)?
                } else {
                    let floor = 1e-3 * self.options.tail_tolerance * running;
                    self.momentum_integral(d, phi, spec.kappa(n), temperature_k, which, floor)
                        .map_err(|e| {
                            e.at(EvalContext {
                                kappa_per_m: Some(spec.kappa(n)),
                                ..Default::default()
                            })
                        })?
                };
                running += term.abs();
                Ok(term)
            },
            &spec,
        )?;
        Ok(Evaluation {
            value: sum.value,
            n_terms: sum.terms,
        })
    }

    fn quantum(&self, d: f64, phi: f64, which: Quantity) -> Result<Evaluation> {
        let outer = QuadratureSpec {
            semi_infinite_scale: 1.0 / (2.0 * d),
            ..self.options.quadrature
        };
        let mut evaluations = 0usize;
        let est = try_integrate_semi_infinite(
            |kappa| {
                evaluations += 1;
                if kappa == 0.0 {
                    return Ok(0.0);
                }
                self.momentum_integral(d, phi, kappa, 0.0, which, 0.0).map_err(|e| {
                    e.at(EvalContext {
                        kappa_per_m: Some(kappa),
                        ..Default::default()
                    })
                })
            },
            &outer,
        )?;
        Ok(Evaluation {
            value: HBAR * C / (2.0 * PI) * est.value,
            n_terms: evaluations,
        })
    }

    /// `∫ d²k⊥/(2π)²` of the energy or torque integrand at `κ > 0` (1/m²).
    fn momentum_integral(
        &self,
        d: f64,
        phi: f64,
        kappa: f64,
        temperature_k: f64,
        which: Quantity,
        floor: f64,
    ) -> Result<f64> {
        let xi = kappa * C;
        let s1 = self.first.slice(xi, temperature_k)?;
        let s2 = self.second.slice(xi, temperature_k)?;
        let (sin_p, cos_p) = phi.sin_cos();
        let (sx1, sx2) = (s1.s_xx(), s2.s_xx());
        let g = |k: f64, theta: f64| -> Result<f64> {
            let lam = super::fresnel::lambda(kappa, k);
            let q = (kappa * kappa + k * k).sqrt();
            let a = (-2.0 * d * q).exp();
            if a == 0.0 {
                return Ok(0.0);
            }
            let (sin_t, cos_t) = theta.sin_cos();
            let geom = Geometry::new(self.options.frame, k, sin_t, cos_t, sin_p, cos_p, phi);
            let sy1 = s1.s_yy(geom.ky1)?;
            let sy2 = s2.s_yy(geom.ky2)?;
            let first = geom.first(sx1, sy1);
            let second = geom.second(sx2, sy2);
            let fail = |what| Error::Singular {
                what,
                context: EvalContext {
                    kappa_per_m: Some(kappa),
                    k_perp_per_m: Some(k),
                    angle_rad: Some(phi),
                    ..Default::default()
                },
            };
            let (r0, _) = fresnel_with_derivative(&first, &[0.0; 4], lam)
                .ok_or_else(|| fail("Fresnel denominator delta"))?;
            match which {
                Quantity::Energy => {
                    let (rphi, _) = fresnel_with_derivative(&second, &[0.0; 4], lam)
                        .ok_or_else(|| fail("Fresnel denominator delta"))?;
                    log_det_one_minus(a, &r0, &rphi).ok_or_else(|| fail("round-trip matrix"))
                }
                Quantity::Torque => {
                    let ds = geom.second_derivative(&s2, sx2, sy2)?;
                    let (rphi, drphi) = fresnel_with_derivative(&second, &ds, lam)
                        .ok_or_else(|| fail("Fresnel denominator delta"))?;
                    torque_trace(a, &r0, &rphi, &drphi).ok_or_else(|| fail("round-trip matrix"))
                }
            }
        };
        let kink = (PI - phi).rem_euclid(PI);
        let scale = (1.0 / (2.0 * d)).max(0.5 * (kappa / d).sqrt());
        let mut options = PolarOptions {
            symmetry: AngularSymmetry::HalfPeriod,
            angular_breakpoints: vec![kink],
            angular_tolerance: self.options.angular_tolerance,
            radial_floor: radial_floor(self.options.angular_tolerance, d, kappa, scale),
        };
        let mut spec = QuadratureSpec {
            semi_infinite_scale: scale,
            absolute_floor: floor,
            ..self.options.quadrature
        };
        if which == Quantity::Torque {
            // dσ_yy/dk is a finite difference; its noise caps the attainable
            // angular accuracy.
            options.angular_tolerance = options.angular_tolerance.max(TORQUE_ANGULAR_TOLERANCE);
            options.radial_floor = radial_floor(options.angular_tolerance, d, kappa, scale);
            spec.reference = ToleranceReference::Magnitude;
            spec.absolute_floor = floor.max(
                1e-3 * self.options.quadrature.relative_tolerance * round_trip_bound(d, kappa),
            );
        }
        Ok(try_integrate_polar_2d(g, &spec, &options)?.value)
    }

    /// The `n = 0` integrand integrated over `k⊥` (1/m²), without the ½.
    fn zero_frequency_term(&self, d: f64, phi: f64, temperature_k: f64, which: Quantity) -> Result<f64> {
        match self.options.zero_frequency {
            ZeroFrequencyBranch::Stated => match which {
                // R₀ = R_φ = diag(0,1): no φ dependence, no torque.
                Quantity::Torque => Ok(0.0),
                Quantity::Energy => {
                    let spec = QuadratureSpec {
                        semi_infinite_scale: 1.0 / (2.0 * d),
                        ..self.options.quadrature
                    };
                    let options = PolarOptions {
                        symmetry: AngularSymmetry::Isotropic,
                        ..Default::default()
                    };
                    let n0 = super::fresnel::fresnel_n0_limit(phi).r;
                    Ok(try_integrate_polar_2d(
                        |k, _| {
                            let a = (-2.0 * d * k).exp();
                            log_det_one_minus(a, &n0, &n0).ok_or_else(|| Error::Singular {
                                what: "round-trip matrix at n = 0",
                                context: EvalContext {
                                    k_perp_per_m: Some(k),
                                    ..Default::default()
                                },
                            })
                        },
                        &spec,
                        &options,
                    )?
                    .value)
                }
            },
            ZeroFrequencyBranch::NumericLimit => self.numeric_zero_frequency(d, phi, temperature_k, which),
        }
    }

    fn numeric_zero_frequency(&self, d: f64, phi: f64, temperature_k: f64, which: Quantity) -> Result<f64> {
        let (sin_p, cos_p) = phi.sin_cos();
        let g = |k: f64, theta: f64| -> Result<f64> {
            let a = (-2.0 * d * k).exp();
            if a == 0.0 || k == 0.0 {
                return Ok(0.0);
            }
            let (r0, rphi, drphi) = self.extrapolated_matrices(k, theta, sin_p, cos_p, phi, temperature_k)?;
            let fail = || Error::Singular {
                what: "round-trip matrix at n = 0",
                context: EvalContext {
                    k_perp_per_m: Some(k),
                    angle_rad: Some(phi),
                    ..Default::default()
                },
            };
            match which {
                Quantity::Energy => log_det_one_minus(a, &r0, &rphi).ok_or_else(fail),
                Quantity::Torque => torque_trace(a, &r0, &rphi, &drphi).ok_or_else(fail),
            }
        };
        let spec = QuadratureSpec {
            semi_infinite_scale: 1.0 / (2.0 * d),
            reference: match which {
                Quantity::Energy => ToleranceReference::Value,
                Quantity::Torque => ToleranceReference::Magnitude,
            },
            absolute_floor: 1e-3 * self.options.quadrature.relative_tolerance * round_trip_bound(d, 0.0),
            ..self.options.quadrature
        };
        let options = PolarOptions {
            symmetry: AngularSymmetry::HalfPeriod,
            angular_breakpoints: vec![(PI - phi).rem_euclid(PI)],
            angular_tolerance: self.options.angular_tolerance,
            radial_floor: radial_floor(self.options.angular_tolerance, d, 0.0, spec.semi_infinite_scale),
        };
        Ok(try_integrate_polar_2d(g, &spec, &options)?.value)
    }

    /// `(R₀, R_φ, dR_φ/dφ)` extrapolated linearly to `κ → 0` from
    /// `κ = 10⁻⁴k⊥` and `5·10⁻⁵k⊥`.
    fn extrapolated_matrices(
        &self,
        k: f64,
        theta: f64,
        sin_p: f64,
        cos_p: f64,
        phi: f64,
        temperature_k: f64,
    ) -> Result<(Mat2, Mat2, Mat2)> {
        let at = |kappa: f64| -> Result<(Mat2, Mat2, Mat2)> {
            let xi = kappa * C;
            let s1 = self.first.slice(xi, temperature_k)?;
            let s2 = self.second.slice(xi, temperature_k)?;
            let lam = super::fresnel::lambda(kappa, k);
            let (sin_t, cos_t) = theta.sin_cos();
            let geom = Geometry::new(self.options.frame, k, sin_t, cos_t, sin_p, cos_p, phi);
            let (sx2, sy2) = (s2.s_xx(), s2.s_yy(geom.ky2)?);
            let first = geom.first(s1.s_xx(), s1.s_yy(geom.ky1)?);
            let second = geom.second(sx2, sy2);
            let ds = geom.second_derivative(&s2, sx2, sy2)?;
            let fail = || Error::Singular {
                what: "Fresnel denominator delta",
                context: EvalContext {
                    kappa_per_m: Some(kappa),
                    k_perp_per_m: Some(k),
                    ..Default::default()
                },
            };
            let (r0, _) = fresnel_with_derivative(&first, &[0.0; 4], lam).ok_or_else(fail)?;
            let (rphi, drphi) = fresnel_with_derivative(&second, &ds, lam).ok_or_else(fail)?;
            Ok((r0, rphi, drphi))
        };
        let h = 1e-4 * k;
        let (a0, a1, a2) = at(h)?;
        let (b0, b1, b2) = at(0.5 * h)?;
        let ex = |x: &Mat2, y: &Mat2| -> Mat2 {
            let mut out = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    out[i][j] = 2.0 * y[i][j] - x[i][j];
                }
            }
            out
        };
        Ok((ex(&a0, &b0), ex(&a1, &b1), ex(&a2, &b2)))
    }

    /// Compares the stated `n = 0` matrix with the numerical `κ → 0` limit
    /// of the second film's reflection matrix at one wave vector; logs a
    /// warning above `1e-3`.
    pub fn zero_frequency_report(&self, phi: f64, k_perp: f64, theta: f64, temperature_k: f64) -> Result<ZeroFrequencyReport> {
        let (sin_p, cos_p) = phi.sin_cos();
        let (_, rphi, _) = self.extrapolated_matrices(k_perp, theta, sin_p, cos_p, phi, temperature_k)?;
        let stated = super::fresnel::fresnel_n0_limit(phi).r;
        let mut diff = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                diff = diff.max((rphi[i][j] - stated[i][j]).abs());
            }
        }
        if diff > 1e-3 {
            log::warn!(
                "zero-frequency limit of the sheet formula differs from diag(0,1) by {diff:.3e} \
                 at k = {k_perp:e} 1/m, theta = {theta}, phi = {phi}: extrapolated {rphi:?}"
            );
        }
        Ok(ZeroFrequencyReport {
            stated,
            extrapolated: rphi,
            max_abs_difference: diff,
        })
    }
}

/// True when `φ` is a multiple of `π/2` (to rounding).
fn on_symmetry_axis(phi: f64) -> bool {
    let r = phi.rem_euclid(FRAC_PI_2);
    r < 1e-14 || FRAC_PI_2 - r < 1e-14
}

/// Tensor of a film rotated by `φ`, `(xx, xy, yx, yy)`.
fn rotated(sx: f64, sy: f64, sin_p: f64, cos_p: f64) -> [f64; 4] {
    let off = (sy - sx) * sin_p * cos_p;
    [
        sx * cos_p * cos_p + sy * sin_p * sin_p,
        off,
        off,
        sx * sin_p * sin_p + sy * cos_p * cos_p,
    ]
}

/// Where the two films sit relative to the tensor frame at one `(k⊥, θ)`.
struct Geometry {
    k: f64,
    /// Momenta along each film's tubes.
    ky1: f64,
    ky2: f64,
    /// `sin, cos` of `θ + φ`.
    tp: (f64, f64),
    /// Rotation of film 1 in the tensor frame as `(sin, cos)`, if any.
    rot1: Option<(f64, f64)>,
    /// Rotation of film 2 as `(sin, cos, angle)`.
    rot2: (f64, f64, f64),
}

impl Geometry {
    fn new(frame: FresnelFrame, k: f64, sin_t: f64, cos_t: f64, sin_p: f64, cos_p: f64, phi: f64) -> Self {
        let sin_tp = sin_t * cos_p + cos_t * sin_p;
        let cos_tp = cos_t * cos_p - sin_t * sin_p;
        let (rot1, rot2) = match frame {
            FresnelFrame::FilmAxes => (None, (sin_p, cos_p, phi)),
            FresnelFrame::WaveVector => (Some((sin_t, cos_t)), (sin_tp, cos_tp, sin_tp.atan2(cos_tp))),
        };
        Self {
            k,
            ky1: (k * sin_t).abs(),
            ky2: (k * sin_tp).abs(),
            tp: (sin_tp, cos_tp),
            rot1,
            rot2,
        }
    }

    fn first(&self, sx: f64, sy: f64) -> [f64; 4] {
        match self.rot1 {
            None => [sx, 0.0, 0.0, sy],
            Some((s, c)) => rotated(sx, sy, s, c),
        }
    }

    fn second(&self, sx: f64, sy: f64) -> [f64; 4] {
        rotated(sx, sy, self.rot2.0, self.rot2.1)
    }

    /// `dσ/dφ` of the second film at fixed `k⊥, θ`: the rotation of the
    /// tensor plus the change of `σ_yy` with the momentum `|k⊥ sin(θ + φ)|`
    /// along the rotated tubes.
    fn second_derivative(&self, s2: &SheetSlice<'_>, sx: f64, sy: f64) -> Result<[f64; 4]> {
        let (sin_r, cos_r, angle) = self.rot2;
        let mut ds = ConductivityTensor::rotation_derivative(sx, sy, angle);
        if self.ky2 > 0.0 {
            let dky = self.k * self.tp.1 * self.tp.0.signum();
            let dsy = s2.ds_yy_dk(self.ky2)? * dky;
            if dsy != 0.0 {
                let off = dsy * sin_r * cos_r;
                ds[0] += dsy * sin_r * sin_r;
                ds[1] += off;
                ds[2] += off;
                ds[3] += dsy * cos_r * cos_r;
            }
        }
        Ok(ds)
    }
}

/// `(1/2π) ∫ k dk a/(1 - a)`, `a = e^{-2D√(κ²+k²)}`: an upper bound on the
/// magnitude of the momentum integrals for passive sheets, up to `‖dR‖`.
fn round_trip_bound(d: f64, kappa: f64) -> f64 {
    // Σ_m ∫_κ^∞ q e^{-2mDq} dq = Σ_m e^{-2mDκ}(κ/(2mD) + 1/(4m²D²))
    let mut acc = 0.0;
    for m in 1..=200 {
        let m = m as f64;
        let t = (-2.0 * m * d * kappa).exp() * (kappa / (2.0 * m * d) + 1.0 / (4.0 * m * m * d * d));
        acc += t;
        if t < 1e-6 * acc {
            break;
        }
    }
    acc / (2.0 * PI)
}

/// Pointwise error target for the radial integrand `k ∫dθ g` such that the
/// accumulated error stays ~1e-2 `tolerance` of the largest possible integral.
/// Keeps the angular integrals from resolving regions where `e^{-2Dq}` has
/// already killed the integrand.
fn radial_floor(tolerance: f64, d: f64, kappa: f64, scale: f64) -> f64 {
    1e-2 * tolerance * 4.0 * PI * PI * round_trip_bound(d, kappa) / scale
}

/// Casimir energy per unit area (J/m²).
pub fn casimir_energy(pt: &CasimirPoint, films: &FilmPair) -> Result<Evaluation> {
    films.energy(pt)
}

/// Casimir torque per unit area (N·m/m²), `𝒯 = -∂E/∂φ`.
pub fn casimir_torque(pt: &CasimirPoint, films: &FilmPair) -> Result<Evaluation> {
    films.torque(pt)
}
