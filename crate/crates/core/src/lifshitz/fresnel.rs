//! Reflection matrices of a conducting sheet and the Lifshitz integrands.
//!
//! With `s = 2πσ/c` (reduced, dimensionless) and `λ = √(k⊥²/κ² + 1)`,
//!
//! ```text
//! R = (1/δ) [ -(s_yy/λ + det s)   -s_yx          ]
//!           [  s_xy               λ s_xx + det s ]
//! δ = 1 + λ s_xx + s_yy/λ + det s
//! ```
//!
//! For an isotropic sheet this reduces to the familiar TE (`-s/λ/(1+s/λ)`)
//! and TM (`λs/(1+λs)`) sheet coefficients.

use crate::error::EvalContext;
use crate::film::ConductivityTensor;
use crate::{Error, Result};

pub type Mat2 = [[f64; 2]; 2];

pub(crate) fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

pub(crate) fn det(a: &Mat2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub(crate) fn trace(a: &Mat2) -> f64 {
    a[0][0] + a[1][1]
}

/// In-plane wave vector in film-1 axes (tubes of the unrotated film along
/// `y`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveVector {
    pub k_perp: f64,
    pub theta: f64,
}

impl WaveVector {
    pub fn new(k_perp: f64, theta: f64) -> Self {
        Self { k_perp, theta }
    }

    pub fn k_x(&self) -> f64 {
        self.k_perp * self.theta.cos()
    }

    pub fn k_y(&self) -> f64 {
        self.k_perp * self.theta.sin()
    }

    /// `|k⊥ · ŷ_φ|`, the momentum along the tubes of a film rotated by `φ`
    /// (tube direction `(sin φ, cos φ)`).
    pub fn along_tubes(&self, phi: f64) -> f64 {
        (self.k_perp * (self.theta + phi).sin()).abs()
    }
}

/// `λ_n = √(k⊥²/κ² + 1)`.
pub fn lambda(kappa: f64, k_perp: f64) -> f64 {
    let r = k_perp / kappa;
    (r * r + 1.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionMatrix {
    pub r: Mat2,
    pub delta: f64,
    pub lambda: f64,
}

impl ReflectionMatrix {
    pub fn r_xx(&self) -> f64 {
        self.r[0][0]
    }
    pub fn r_xy(&self) -> f64 {
        self.r[0][1]
    }
    pub fn r_yx(&self) -> f64 {
        self.r[1][0]
    }
    pub fn r_yy(&self) -> f64 {
        self.r[1][1]
    }

    /// Largest singular value.
    pub fn norm(&self) -> f64 {
        let a = &self.r;
        let f2 = a[0][0].powi(2) + a[0][1].powi(2) + a[1][0].powi(2) + a[1][1].powi(2);
        let d = det(a);
        (0.5 * (f2 + (f2 * f2 - 4.0 * d * d).max(0.0).sqrt())).sqrt()
    }
}

/// Reduced tensor entries `(xx, xy, yx, yy)`.
type Entries = [f64; 4];

fn entries(t: &ConductivityTensor) -> Entries {
    [t.xx, t.xy, t.yx, t.yy]
}

fn reflection_from(s: &Entries, lam: f64) -> (Mat2, f64, f64) {
    let [xx, xy, yx, yy] = *s;
    let ds = xx * yy - xy * yx;
    let delta = 1.0 + lam * xx + yy / lam + ds;
    let n = [[-(yy / lam + ds), -yx], [xy, lam * xx + ds]];
    (n, delta, ds)
}

fn singular(context: EvalContext) -> Error {
    Error::Singular {
        what: "Fresnel denominator delta",
        context,
    }
}

/// Reflection matrix of a sheet with (already rotated) reduced tensor `s`.
pub fn fresnel_matrix(s: &ConductivityTensor, kappa: f64, kv: &WaveVector) -> Result<ReflectionMatrix> {
    if !(kappa > 0.0) {
        return Err(Error::Domain {
            function: "fresnel_matrix",
            value: kappa,
            reason: "kappa must be > 0 (use fresnel_n0_limit at n = 0)",
        });
    }
    let lam = lambda(kappa, kv.k_perp);
    let (n, delta, _) = reflection_from(&entries(s), lam);
    if delta == 0.0 || !delta.is_finite() {
        return Err(singular(EvalContext {
            kappa_per_m: Some(kappa),
            k_perp_per_m: Some(kv.k_perp),
            angle_rad: Some(s.phi),
            ..Default::default()
        }));
    }
    let inv = 1.0 / delta;
    Ok(ReflectionMatrix {
        r: [[n[0][0] * inv, n[0][1] * inv], [n[1][0] * inv, n[1][1] * inv]],
        delta,
        lambda: lam,
    })
}

/// The stated zero-frequency reflection matrix, `diag(0, 1)` for every `φ`.
pub fn fresnel_n0_limit(_phi: f64) -> ReflectionMatrix {
    ReflectionMatrix {
        r: [[0.0, 0.0], [0.0, 1.0]],
        delta: f64::INFINITY,
        lambda: f64::INFINITY,
    }
}

/// `R` and `dR` given the tensor `s` and its derivative `ds` with respect
/// to some parameter (at fixed `κ`, `k⊥`).
pub(crate) fn fresnel_with_derivative(s: &Entries, ds: &Entries, lam: f64) -> Option<(Mat2, Mat2)> {
    let (n, delta, _) = reflection_from(s, lam);
    if delta == 0.0 || !delta.is_finite() {
        return None;
    }
    let [xx, xy, yx, yy] = *s;
    let [dxx, dxy, dyx, dyy] = *ds;
    let ddet = dxx * yy + xx * dyy - dxy * yx - xy * dyx;
    let dn = [[-(dyy / lam + ddet), -dyx], [dxy, lam * dxx + ddet]];
    let ddelta = lam * dxx + dyy / lam + ddet;
    let inv = 1.0 / delta;
    let mut r = [[0.0; 2]; 2];
    let mut dr = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = n[i][j] * inv;
            dr[i][j] = (dn[i][j] - r[i][j] * ddelta) * inv;
        }
    }
    Some((r, dr))
}

/// `dR_φ/dφ` for a film whose unrotated (diagonal) tensor is `sigma`,
/// holding the conductivities fixed: only the rotation of the tensor
/// contributes.
pub fn reflection_derivative(sigma: &ConductivityTensor, phi: f64, kappa: f64, kv: &WaveVector) -> Result<Mat2> {
    if !(kappa > 0.0) {
        return Err(Error::Domain {
            function: "reflection_derivative",
            value: kappa,
            reason: "kappa must be > 0",
        });
    }
    let rotated = sigma.rotate(phi);
    let ds = ConductivityTensor::rotation_derivative(sigma.xx, sigma.yy, phi);
    fresnel_with_derivative(&entries(&rotated), &ds, lambda(kappa, kv.k_perp))
        .map(|(_, dr)| dr)
        .ok_or_else(|| {
            singular(EvalContext {
                kappa_per_m: Some(kappa),
                k_perp_per_m: Some(kv.k_perp),
                angle_rad: Some(phi),
                ..Default::default()
            })
        })
}

/// `ln det(1 - e^{-2Dq} R₀R_φ)`, `q = √(κ² + k⊥²)`, `D` in metres.
pub fn energy_integrand(separation_m: f64, kappa: f64, k_perp: f64, r0: &Mat2, rphi: &Mat2) -> Result<f64> {
    let q = (kappa * kappa + k_perp * k_perp).sqrt();
    let a = (-2.0 * separation_m * q).exp();
    log_det_one_minus(a, r0, rphi).ok_or_else(|| {
        singular_round_trip(EvalContext {
            separation_nm: Some(separation_m * 1e9),
            kappa_per_m: Some(kappa),
            k_perp_per_m: Some(k_perp),
            ..Default::default()
        })
    })
}

fn singular_round_trip(context: EvalContext) -> Error {
    Error::Singular {
        what: "round-trip matrix 1 - exp(-2Dq) R0 Rphi",
        context,
    }
}

/// `ln det(1 - aM)` with `M = R₀R_φ`, expanded as `ln(1 - a tr M + a² det M)`.
pub(crate) fn log_det_one_minus(a: f64, r0: &Mat2, rphi: &Mat2) -> Option<f64> {
    if a == 0.0 {
        return Some(0.0);
    }
    let m = mul(r0, rphi);
    let x = -a * trace(&m) + a * a * det(&m);
    if x <= -1.0 {
        return None;
    }
    Some(x.ln_1p())
}

/// `tr[(e^{2Dq} - M)^{-1} R₀ dR_φ] = tr[(1 - aM)^{-1} a R₀ dR_φ]`.
pub(crate) fn torque_trace(a: f64, r0: &Mat2, rphi: &Mat2, drphi: &Mat2) -> Option<f64> {
    if a == 0.0 {
        return Some(0.0);
    }
    let m = mul(r0, rphi);
    let b = [
        [1.0 - a * m[0][0], -a * m[0][1]],
        [-a * m[1][0], 1.0 - a * m[1][1]],
    ];
    let db = det(&b);
    if db <= 0.0 {
        return None;
    }
    let inv = [[b[1][1] / db, -b[0][1] / db], [-b[1][0] / db, b[0][0] / db]];
    let rd = mul(r0, drphi);
    let p = mul(&inv, &rd);
    Some(a * trace(&p))
}
