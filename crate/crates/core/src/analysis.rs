//! Post-processing of energy and torque grids: local scaling exponents,
//! the quantum-thermal crossover distance, torque sign flips and
//! `sin 2φ` fits.

use serde::{Deserialize, Serialize};

use crate::lifshitz::{CasimirPoint, FilmPair, Mode};
use crate::{Error, Result};

/// Exponent separating the `1/D³` and `1/D⁴` regimes.
pub const TRANSITION_EXPONENT: f64 = 3.5;

/// Relative bracket width at which the bisections stop.
pub const BISECTION_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingResult {
    /// Interior separations (nm) at which `p` is reported.
    pub separation_nm: Vec<f64>,
    /// Local exponent `p = -d ln|E|/d ln D`.
    pub exponent: Vec<f64>,
    /// Where `p` crosses [`TRANSITION_EXPONENT`], if it does.
    pub transition_nm: Option<f64>,
}

/// Local exponents from `(D, E)` samples.
///
/// Uses the three-point derivative on the (possibly non-uniform) log-log
/// grid, which is exact for pure power laws.
pub fn local_log_slope(samples: &[(f64, f64)]) -> Result<ScalingResult> {
    if samples.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "local_log_slope needs at least 3 samples, got {}",
            samples.len()
        )));
    }
    let sign = samples[0].1.signum();
    let mut x = Vec::with_capacity(samples.len());
    let mut y = Vec::with_capacity(samples.len());
    for (i, &(d, e)) in samples.iter().enumerate() {
        if !(d > 0.0) || !d.is_finite() || !e.is_finite() {
            return Err(Error::InvalidParameter(format!("sample {i}: need finite D > 0 and finite E")));
        }
        if e == 0.0 || e.signum() != sign {
            return Err(Error::InvalidParameter(format!(
                "sample {i}: energy changes sign or vanishes, log slope undefined"
            )));
        }
        if i > 0 && d <= samples[i - 1].0 {
            return Err(Error::InvalidParameter("separations must be strictly increasing".into()));
        }
        x.push(d.ln());
        y.push(e.abs().ln());
    }
    let mut separation_nm = Vec::with_capacity(samples.len() - 2);
    let mut exponent = Vec::with_capacity(samples.len() - 2);
    for i in 1..samples.len() - 1 {
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        let slope = (h0 * h0 * (y[i + 1] - y[i]) + h1 * h1 * (y[i] - y[i - 1])) / (h0 * h1 * (h0 + h1));
        separation_nm.push(samples[i].0);
        exponent.push(-slope);
    }
    let mut transition_nm = None;
    for i in 1..exponent.len() {
        let (a, b) = (exponent[i - 1] - TRANSITION_EXPONENT, exponent[i] - TRANSITION_EXPONENT);
        if a == 0.0 {
            transition_nm = Some(separation_nm[i - 1]);
            break;
        }
        if a * b < 0.0 || b == 0.0 {
            // Linear in ln D between the two interior points.
            let (l0, l1) = (separation_nm[i - 1].ln(), separation_nm[i].ln());
            transition_nm = Some((l0 + (l1 - l0) * a / (a - b)).exp());
            break;
        }
    }
    Ok(ScalingResult {
        separation_nm,
        exponent,
        transition_nm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossoverResult {
    /// `D_c` (nm), the midpoint of the final bracket.
    pub separation_nm: f64,
    pub bracket_nm: (f64, f64),
    /// `(|E_qm| - |E_T|)/|E_T|` at `D_c`.
    pub residual: f64,
    pub quantum_energy: f64,
    pub thermal_energy: f64,
}

/// Solves `|E_qm(D)| = |E_T(D)|` by bisection in `ln D`.
///
/// `energies(D_nm)` returns `(E_qm, E_T)`. Returns `Ok(None)` when the
/// difference does not change sign on the bracket.
pub fn crossover_by_bisection<F>(mut energies: F, bracket_nm: (f64, f64)) -> Result<Option<CrossoverResult>>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let (mut lo, mut hi) = bracket_nm;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidParameter(format!(
            "crossover bracket must satisfy 0 < lo < hi, got ({lo}, {hi})"
        )));
    }
    let diff = |(q, t): (f64, f64)| q.abs() - t.abs();
    let f_lo = diff(energies(lo)?);
    let f_hi = diff(energies(hi)?);
    if f_lo == 0.0 {
        hi = lo;
    } else if f_hi == 0.0 {
        lo = hi;
    } else if f_lo * f_hi > 0.0 {
        return Ok(None);
    }
    let mut sign_lo = f_lo.signum();
    while hi / lo - 1.0 > BISECTION_TOLERANCE {
        let mid = (lo * hi).sqrt();
        let f = diff(energies(mid)?);
        if f == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if f.signum() == sign_lo {
            lo = mid;
            sign_lo = f.signum();
        } else {
            hi = mid;
        }
    }
    let d_c = (lo * hi).sqrt();
    let (q, t) = energies(d_c)?;
    Ok(Some(CrossoverResult {
        separation_nm: d_c,
        bracket_nm: (lo, hi),
        residual: (q.abs() - t.abs()) / t.abs(),
        quantum_energy: q,
        thermal_energy: t,
    }))
}

/// Distance where the quantum energy of `films` equals the thermal
/// (`n = 0`) energy at angle `phi` and temperature `temperature_k`.
pub fn quantum_thermal_crossover(
    phi: f64,
    temperature_k: f64,
    films: &FilmPair,
    bracket_nm: (f64, f64),
) -> Result<Option<CrossoverResult>> {
    if temperature_k == 0.0 {
        return Ok(None);
    }
    crossover_by_bisection(
        |d| {
            let q = films.energy(&CasimirPoint::new(d, phi, 0.0, Mode::Quantum))?.value;
            let t = films
                .energy(&CasimirPoint::new(d, phi, temperature_k, Mode::Thermal))?
                .value;
            Ok((q, t))
        },
        bracket_nm,
    )
}

/// Smallest separation on `grid_nm` (ascending) at which `torque(D)`
/// changes sign, refined by bisection in `ln D`.
pub fn sign_flip_by_bisection<F>(mut torque: F, grid_nm: &[f64]) -> Result<Option<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    if grid_nm.windows(2).any(|w| !(w[1] > w[0])) || grid_nm.first().is_some_and(|d| !(*d > 0.0)) {
        return Err(Error::InvalidParameter("separation grid must be positive and strictly increasing".into()));
    }
    let mut prev: Option<(f64, f64)> = None;
    for &d in grid_nm {
        let t = torque(d)?;
        if t == 0.0 {
            // Exact zeros carry no sign; skip them rather than report one.
            continue;
        }
        if let Some((d0, t0)) = prev {
            if t0.signum() != t.signum() {
                let (mut lo, mut hi, s_lo) = (d0, d, t0.signum());
                while hi / lo - 1.0 > BISECTION_TOLERANCE {
                    let mid = (lo * hi).sqrt();
                    let f = torque(mid)?;
                    if f == 0.0 {
                        return Ok(Some(mid));
                    }
                    if f.signum() == s_lo {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return Ok(Some((lo * hi).sqrt()));
            }
        }
        prev = Some((d, t));
    }
    Ok(None)
}

/// Separation at which the torque at `phi_probe` changes sign.
pub fn torque_phase_flip(
    phi_probe: f64,
    temperature_k: f64,
    mode: Mode,
    films: &FilmPair,
    grid_nm: &[f64],
) -> Result<Option<f64>> {
    sign_flip_by_bisection(
        |d| Ok(films.torque(&CasimirPoint::new(d, phi_probe, temperature_k, mode))?.value),
        grid_nm,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sin2PhiFit {
    pub amplitude: f64,
    /// `RMS(𝒯 - A sin 2φ)/RMS(𝒯)`.
    pub residual_fraction: f64,
}

/// Least-squares `𝒯 ≈ A sin 2φ`.
pub fn fit_sin2phi(samples: &[(f64, f64)]) -> Result<Sin2PhiFit> {
    if samples.len() < 8 {
        return Err(Error::InvalidParameter(format!(
            "fit_sin2phi needs at least 8 angles, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|(p, t)| !p.is_finite() || !t.is_finite()) {
        return Err(Error::InvalidParameter("fit_sin2phi: non-finite sample".into()));
    }
    let (mut st, mut ss, mut tt) = (0.0, 0.0, 0.0);
    for &(phi, t) in samples {
        let s = (2.0 * phi).sin();
        st += s * t;
        ss += s * s;
        tt += t * t;
    }
    if tt == 0.0 {
        return Ok(Sin2PhiFit {
            amplitude: 0.0,
            residual_fraction: 0.0,
        });
    }
    if ss == 0.0 {
        return Err(Error::InvalidParameter("fit_sin2phi: every angle is a zero of sin 2φ".into()));
    }
    let amplitude = st / ss;
    let res: f64 = samples
        .iter()
        .map(|&(phi, t)| {
            let r = t - amplitude * (2.0 * phi).sin();
            r * r
        })
        .sum();
    Ok(Sin2PhiFit {
        amplitude,
        residual_fraction: (res / tt).sqrt(),
    })
}
