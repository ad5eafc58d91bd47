//! Transform of sampled `Re σ(ω)` onto the imaginary frequency axis,
//! `σ(iξ) = (2/π) ∫₀^∞ Re σ(ω) ξ/(ω² + ξ²) dω`.
//!
//! `Re σ` is taken piecewise linear between samples and the kernel is
//! integrated exactly on each segment, so the transform of a linear
//! interpolant is exact to rounding.

use std::f64::consts::PI;

use crate::{Error, Result};

/// How spectral weight beyond the last sample is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpectralTail {
    /// Nothing beyond the grid.
    #[default]
    None,
    /// `Re σ(ω) = Re σ(ω_max) (ω_max/ω)²` beyond the grid (Drude/Lorentz tail).
    InverseSquare,
}

/// Real part of a conductivity sampled on a strictly increasing,
/// nonnegative frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSamples {
    omega: Vec<f64>,
    re_sigma: Vec<f64>,
    tail: SpectralTail,
}

impl SpectralSamples {
    pub fn new(omega: Vec<f64>, re_sigma: Vec<f64>, tail: SpectralTail) -> Result<Self> {
        if omega.len() != re_sigma.len() || omega.len() < 2 {
            return Err(Error::Spectral(
                "need at least two (omega, Re sigma) samples of equal length".into(),
            ));
        }
        if omega[0] < 0.0 {
            return Err(Error::Spectral("frequencies must be >= 0".into()));
        }
        if let Some(i) = omega.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::Spectral(format!(
                "frequencies must be strictly increasing (row {})",
                i + 1
            )));
        }
        if let Some(i) = re_sigma.iter().position(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::Spectral(format!(
                "negative or non-finite Re sigma at row {i} ({})",
                re_sigma[i]
            )));
        }
        let peak = re_sigma.iter().copied().fold(0.0, f64::max);
        let last = *re_sigma.last().unwrap();
        if tail == SpectralTail::None && peak > 0.0 && last > 1e-3 * peak {
            log::warn!(
                "spectral grid ends at {:e} rad/s with Re sigma still {:.2e} of its peak; \
                 weight beyond the grid is ignored",
                omega[omega.len() - 1],
                last / peak
            );
        }
        Ok(Self {
            omega,
            re_sigma,
            tail,
        })
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn re_sigma(&self) -> &[f64] {
        &self.re_sigma
    }

    /// Linear interpolation of `Re σ` (zero outside the grid except for the
    /// declared tail).
    pub fn interpolate(&self, w: f64) -> f64 {
        let n = self.omega.len();
        if w < self.omega[0] {
            return 0.0;
        }
        if w >= self.omega[n - 1] {
            return match self.tail {
                SpectralTail::None => {
                    if w == self.omega[n - 1] {
                        self.re_sigma[n - 1]
                    } else {
                        0.0
                    }
                }
                SpectralTail::InverseSquare => {
                    self.re_sigma[n - 1] * (self.omega[n - 1] / w).powi(2)
                }
            };
        }
        let i = self.omega.partition_point(|&x| x <= w) - 1;
        let t = (w - self.omega[i]) / (self.omega[i + 1] - self.omega[i]);
        self.re_sigma[i] + t * (self.re_sigma[i + 1] - self.re_sigma[i])
    }
}

/// `σ(iξ)` from sampled `Re σ(ω)`; same units as the samples. `ξ ≥ 0`.
pub fn kk_to_imaginary_axis(samples: &SpectralSamples, xi: f64) -> Result<f64> {
    if !(xi >= 0.0) || !xi.is_finite() {
        return Err(Error::Domain {
            function: "kk_to_imaginary_axis",
            value: xi,
            reason: "imaginary frequency must be finite and >= 0",
        });
    }
    let w = &samples.omega;
    let s = &samples.re_sigma;
    if xi == 0.0 {
        // The kernel tends to δ(ω) (with the factor 2/π · π/2): σ(0) = Re σ(0).
        return Ok(if w[0] == 0.0 { s[0] } else { 0.0 });
    }
    let mut acc = 0.0;
    for i in 0..w.len() - 1 {
        acc += segment(w[i], w[i + 1], s[i], s[i + 1], xi);
    }
    if samples.tail == SpectralTail::InverseSquare {
        acc += inverse_square_tail(w[w.len() - 1], s[s.len() - 1], xi);
    }
    Ok((2.0 / PI * acc).max(0.0))
}

/// `∫_{w0}^{w1} (a + bω) ξ/(ω²+ξ²) dω` for the linear interpolant through
/// `(w0, s0), (w1, s1)`.
fn segment(w0: f64, w1: f64, s0: f64, s1: f64, xi: f64) -> f64 {
    let slope = (s1 - s0) / (w1 - w0);
    let intercept = s0 - slope * w0;
    // atan difference written to stay accurate for narrow segments
    let datan = ((w1 - w0) * xi).atan2(xi * xi + w0 * w1);
    let dlog = ((w1 * w1 + xi * xi) / (w0 * w0 + xi * xi)).ln();
    intercept * datan + 0.5 * slope * xi * dlog
}

/// `∫_{w}^∞ s (w/ω)² ξ/(ω²+ξ²) dω = (s/r)(1 - atan(r)/r)`, `r = ξ/w`.
fn inverse_square_tail(w: f64, s: f64, xi: f64) -> f64 {
    let r = xi / w;
    // 1 - atan(r)/r = r²/3 - r⁴/5 + …
    let bracket = if r < 1e-3 {
        r * r / 3.0 - r.powi(4) / 5.0 + r.powi(6) / 7.0
    } else {
        1.0 - r.atan() / r
    };
    s * bracket / r
}
