//! Primed Matsubara summation `k_B T [½ t(0) + Σ_{n≥1} t(n)]`.

use std::f64::consts::PI;

use crate::units::{C, HBAR, K_B};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatsubaraSpec {
    pub temperature_k: f64,
    pub max_terms: usize,
    /// Stop once the estimated remainder is below this fraction of the
    /// partial sum.
    pub tail_tolerance: f64,
    /// Halve the n = 0 term. Always true for the Lifshitz sums.
    pub prime_rule: bool,
    /// Never stop before this many terms (n = 0 .. min_terms-1 are always
    /// summed); decay checks only start here.
    pub min_terms: usize,
}

impl MatsubaraSpec {
    pub fn new(temperature_k: f64) -> Self {
        Self {
            temperature_k,
            max_terms: 1_000_000,
            tail_tolerance: 1e-8,
            prime_rule: true,
            min_terms: 1,
        }
    }

    /// `ξ_n = 2π n k_B T/ħ` (rad/s).
    pub fn xi(&self, n: usize) -> f64 {
        2.0 * PI * n as f64 * K_B * self.temperature_k / HBAR
    }

    /// `κ_n = ξ_n / c` (1/m).
    pub fn kappa(&self, n: usize) -> f64 {
        self.xi(n) / C
    }

    /// `k_B T` in joules.
    pub fn thermal_energy(&self) -> f64 {
        K_B * self.temperature_k
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.temperature_k >= 0.0) || !self.temperature_k.is_finite() {
            return Err(Error::InvalidParameter("temperature must be >= 0".into()));
        }
        if self.max_terms < 1 {
            return Err(Error::InvalidParameter("max_terms must be >= 1".into()));
        }
        if !(self.tail_tolerance > 0.0) {
            return Err(Error::InvalidParameter("tail_tolerance must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatsubaraSum {
    /// `k_B T Σ'` including the extrapolated tail.
    pub value: f64,
    /// Number of terms evaluated (n = 0 .. terms-1).
    pub terms: usize,
    /// Geometric tail estimate that was added to the partial sum.
    pub tail: f64,
}

/// Sums `term(n)` with the prime rule and a geometric tail extrapolation.
///
/// Truncation: after `min_terms`, stop when the geometric remainder
/// `t_n r/(1-r)` with `r = t_n/t_{n-1}` falls below
/// `tail_tolerance × |partial|` (or the terms vanish identically).
/// Three successive non-decreasing magnitudes past `min_terms` are reported
/// as [`Error::NonDecay`].
pub fn matsubara_sum<F>(mut term: F, spec: &MatsubaraSpec) -> Result<MatsubaraSum>
where
    F: FnMut(usize) -> Result<f64>,
{
    spec.validate()?;
    let t0 = term(0)?;
    let mut partial = if spec.prime_rule { 0.5 * t0 } else { t0 };
    let mut history = [f64::NAN, f64::NAN, t0];
    let mut rising = 0usize;
    for n in 1..spec.max_terms {
        let t = term(n)?;
        partial += t;
        let prev = history[2];
        history = [history[1], history[2], t];
        if n + 1 < spec.min_terms {
            continue;
        }
        if t == 0.0 && prev == 0.0 {
            return Ok(done(spec, partial, 0.0, n + 1));
        }
        if t.abs() >= prev.abs() && n > 1 {
            rising += 1;
            if rising >= 2 {
                return Err(Error::NonDecay {
                    index: n,
                    terms: history,
                });
            }
            continue;
        }
        rising = 0;
        let r = if prev != 0.0 { t / prev } else { 0.0 };
        let tail = if r > 0.0 && r < 1.0 { t * r / (1.0 - r) } else { 0.0 };
        let threshold = spec.tail_tolerance * partial.abs();
        if tail.abs() <= threshold && t.abs() <= threshold {
            return Ok(done(spec, partial + tail, tail, n + 1));
        }
    }
    Err(Error::SumTruncated {
        max_terms: spec.max_terms,
        partial: partial * spec.thermal_energy(),
        last: history[2],
    })
}

fn done(spec: &MatsubaraSpec, sum: f64, tail: f64, terms: usize) -> MatsubaraSum {
    let kt = spec.thermal_energy();
    MatsubaraSum {
        value: kt * sum,
        terms,
        tail: kt * tail,
    }
}
