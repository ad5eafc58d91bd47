//! Adaptive Gauss–Kronrod (7/15-free, 10/21) quadrature on finite panels,
//! semi-infinite ranges and polar 2D domains.
//!
//! All routines are deterministic: panel refinement order depends only on the
//! integrand values, and the final sum is taken in left-to-right panel order.

use std::f64::consts::PI;

use crate::error::EvalContext;
use crate::{Error, Result};

/// Tolerances and limits for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub relative_tolerance: f64,
    /// Absolute error target below which refinement stops regardless of the
    /// relative criterion. Same units as the integral.
    pub absolute_floor: f64,
    pub max_subdivisions: usize,
    /// Natural length scale of the integration variable for semi-infinite
    /// ranges; initial panels are laid out at multiples of it.
    pub semi_infinite_scale: f64,
    /// What the relative tolerance is measured against.
    pub reference: ToleranceReference,
}

/// Quantity the relative tolerance refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ToleranceReference {
    /// `|∫f|`.
    #[default]
    Value,
    /// `∫|f|`; use for integrands that cancel, where `|∫f|` may be ~0.
    Magnitude,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            relative_tolerance: 1e-7,
            absolute_floor: 0.0,
            max_subdivisions: 400,
            semi_infinite_scale: 1.0,
            reference: ToleranceReference::Value,
        }
    }
}

impl QuadratureSpec {
    pub fn with_scale(mut self, scale: f64) -> Self {
        self.semi_infinite_scale = scale;
        self
    }

    pub fn with_relative_tolerance(mut self, tol: f64) -> Self {
        self.relative_tolerance = tol;
        self
    }

    pub fn with_absolute_floor(mut self, floor: f64) -> Self {
        self.absolute_floor = floor;
        self
    }

    pub fn with_reference(mut self, reference: ToleranceReference) -> Self {
        self.reference = reference;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.relative_tolerance > 0.0) {
            return Err(Error::InvalidParameter(
                "quadrature relative_tolerance must be > 0".into(),
            ));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidParameter(
                "quadrature max_subdivisions must be >= 1".into(),
            ));
        }
        if !(self.semi_infinite_scale > 0.0) || !self.semi_infinite_scale.is_finite() {
            return Err(Error::InvalidParameter(
                "quadrature semi_infinite_scale must be finite and > 0".into(),
            ));
        }
        if !(self.absolute_floor >= 0.0) {
            return Err(Error::InvalidParameter(
                "quadrature absolute_floor must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

// Kronrod 21-point abscissae (the odd entries are the 10-point Gauss nodes).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_5,
    0.973_906_528_517_171_720_078_0,
    0.930_157_491_355_708_226_001_2,
    0.865_063_366_688_984_510_732_1,
    0.780_817_726_586_416_897_063_7,
    0.679_409_568_299_024_406_234_3,
    0.562_757_134_668_604_683_339_0,
    0.433_395_394_129_247_190_799_3,
    0.294_392_862_701_460_198_131_1,
    0.148_874_338_981_631_210_884_8,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_06,
    0.032_558_162_307_964_727_478_82,
    0.054_755_896_574_351_996_031_38,
    0.075_039_674_810_919_952_767_04,
    0.093_125_454_583_697_605_535_07,
    0.109_387_158_802_297_641_899_2,
    0.123_491_976_262_065_851_078_0,
    0.134_709_217_311_473_325_928_1,
    0.142_775_938_577_060_080_797_1,
    0.147_739_104_901_338_491_374_8,
    0.149_445_554_002_916_905_664_9,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_57,
    0.149_451_349_150_580_593_145_8,
    0.219_086_362_515_982_043_995_5,
    0.269_266_719_309_996_355_091_2,
    0.295_524_224_714_752_870_173_9,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    magnitude: f64,
}

/// One 21-point Gauss–Kronrod panel with the QUADPACK error rescaling.
fn gk21<F>(f: &mut F, a: f64, b: f64) -> Result<Panel>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = fc.abs() * WGK[10];
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.is_finite() {
        return Err(Error::NonConvergence {
            estimate: value,
            error: f64::INFINITY,
            subdivisions: 0,
        });
    }
    Ok(Panel {
        a,
        b,
        value,
        error: err,
        magnitude: res_abs,
    })
}

/// Adaptive bisection over an initial set of panel edges (strictly increasing).
fn adaptive<F>(f: &mut F, edges: &[f64], spec: &QuadratureSpec) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    spec.validate()?;
    let mut panels = Vec::with_capacity(edges.len() + spec.max_subdivisions);
    for w in edges.windows(2) {
        if w[1] > w[0] {
            panels.push(gk21(f, w[0], w[1])?);
        }
    }
    let mut evaluations = 21 * panels.len();
    let mut subdivisions = 0;
    loop {
        let (value, error, magnitude) = totals(&mut panels);
        let reference = match spec.reference {
            ToleranceReference::Value => value.abs(),
            ToleranceReference::Magnitude => magnitude,
        };
        let target = spec.absolute_floor.max(spec.relative_tolerance * reference);
        if error <= target || panels.is_empty() {
            return Ok(Estimate {
                value,
                error,
                evaluations,
            });
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::NonConvergence {
                estimate: value,
                error,
                subdivisions,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.error > acc.1 { (i, p.error) } else { acc })
            .0;
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // Panel is at floating-point resolution; nothing more to gain.
            let (value, error, _) = totals(&mut panels);
            let value = value + p.value;
            return Err(Error::NonConvergence {
                estimate: value,
                error: error + p.error,
                subdivisions,
            });
        }
        panels.push(gk21(f, p.a, mid)?);
        panels.push(gk21(f, mid, p.b)?);
        evaluations += 42;
        subdivisions += 1;
    }
}

fn totals(panels: &mut [Panel]) -> (f64, f64, f64) {
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    panels.iter().fold((0.0, 0.0, 0.0), |(v, e, m), p| {
        (v + p.value, e + p.error, m + p.magnitude)
    })
}

/// `∫_a^b f` for a fallible integrand, with optional interior breakpoints.
pub fn try_integrate_interval<F>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut edges = Vec::with_capacity(breakpoints.len() + 2);
    edges.push(a);
    let mut inner: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    edges.extend(inner);
    edges.push(b);
    adaptive(&mut f, &edges, spec)
}

pub fn integrate_interval<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_interval(|x| Ok(f(x)), a, b, &[], spec)
}

/// Number of doublings of the scale covered by explicit panels before the
/// mapped tail panel. `e^{-64}` is far below any tolerance we use.
const SEMI_INFINITE_DOUBLINGS: i32 = 6;

/// `∫₀^∞ f` for a fallible integrand decaying on the scale
/// `spec.semi_infinite_scale`.
///
/// The range is split into log-spaced panels `[0, s], [s, 2s], …, [32s, 64s]`
/// and a tail `[64s, ∞)` mapped to `[0, 1)` by `x = 64s + s t/(1-t)`.
pub fn try_integrate_semi_infinite<F>(mut f: F, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    spec.validate()?;
    let s = spec.semi_infinite_scale;
    let x_tail = s * 2f64.powi(SEMI_INFINITE_DOUBLINGS);
    // Parametrise everything by u ∈ [0, D+1]: u ∈ [0, D] covers [0, x_tail] via
    // piecewise-linear log-spaced panels, u ∈ [D, D+1) is the mapped tail.
    let doublings = SEMI_INFINITE_DOUBLINGS as f64;
    let mut mapped = |u: f64| -> Result<f64> {
        if u < doublings {
            // panel j = floor(u): [0, s] for j = 0, [2^{j-1}s, 2^j s] otherwise
            let j = u.floor();
            let frac = u - j;
            let (lo, hi) = if j == 0.0 {
                (0.0, s)
            } else {
                (s * 2f64.powf(j - 1.0), s * 2f64.powf(j))
            };
            let x = lo + frac * (hi - lo);
            Ok(f(x)? * (hi - lo))
        } else {
            let t = u - doublings;
            let one_minus = 1.0 - t;
            if one_minus <= 0.0 {
                return Ok(0.0);
            }
            let x = x_tail + s * t / one_minus;
            let jac = s / (one_minus * one_minus);
            let v = f(x)?;
            Ok(if v == 0.0 { 0.0 } else { v * jac })
        }
    };
    let edges: Vec<f64> = (0..=SEMI_INFINITE_DOUBLINGS + 1).map(f64::from).collect();
    adaptive(&mut mapped, &edges, spec)
}

pub fn integrate_semi_infinite<F>(mut f: F, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_semi_infinite(|x| Ok(f(x)), spec)
}

/// Azimuthal structure the caller can declare for a polar integrand.
#[derive(Debug, Clone, PartialEq)]
pub enum AngularSymmetry {
    /// No symmetry; integrate θ over `[0, 2π)`.
    None,
    /// `g(k, θ + π) = g(k, θ)`; integrate over `[0, π)` and double.
    HalfPeriod,
    /// `g` independent of θ; a single evaluation per radius.
    Isotropic,
}

/// Options for [`integrate_polar_2d`].
#[derive(Debug, Clone, PartialEq)]
pub struct PolarOptions {
    pub symmetry: AngularSymmetry,
    /// Angles (radians, within the integrated range) where `g` has kinks or
    /// sharp features; used as panel edges.
    pub angular_breakpoints: Vec<f64>,
    /// Relative tolerance of the inner angular integrals.
    pub angular_tolerance: f64,
    /// Absolute error target for the radial integrand `k ∫g dθ`. Inner
    /// integrals stop refining once their error is below it; 0 disables.
    pub radial_floor: f64,
}

impl Default for PolarOptions {
    fn default() -> Self {
        Self {
            symmetry: AngularSymmetry::None,
            angular_breakpoints: Vec::new(),
            angular_tolerance: 1e-9,
            radial_floor: 0.0,
        }
    }
}

fn at_radius(k: f64) -> EvalContext {
    EvalContext {
        k_perp_per_m: Some(k),
        ..Default::default()
    }
}

/// `(1/4π²) ∫₀^∞ k dk ∫₀^{2π} dθ g(k, θ)`.
pub fn try_integrate_polar_2d<G>(
    mut g: G,
    spec: &QuadratureSpec,
    options: &PolarOptions,
) -> Result<Estimate>
where
    G: FnMut(f64, f64) -> Result<f64>,
{
    let mut evaluations = 0usize;
    let mut radial = |k: f64| -> Result<f64> {
        let angular_spec = QuadratureSpec {
            relative_tolerance: options.angular_tolerance,
            absolute_floor: if k > 0.0 { options.radial_floor / k } else { 0.0 },
            ..*spec
        };
        let angular = match options.symmetry {
            AngularSymmetry::Isotropic => {
                evaluations += 1;
                2.0 * PI * g(k, 0.0)?
            }
            AngularSymmetry::HalfPeriod => {
                let est = try_integrate_interval(
                    |t| g(k, t),
                    0.0,
                    PI,
                    &options.angular_breakpoints,
                    &angular_spec,
                )
                .map_err(|e| e.at(at_radius(k)))?;
                evaluations += est.evaluations;
                2.0 * est.value
            }
            AngularSymmetry::None => {
                let est = try_integrate_interval(
                    |t| g(k, t),
                    0.0,
                    2.0 * PI,
                    &options.angular_breakpoints,
                    &angular_spec,
                )
                .map_err(|e| e.at(at_radius(k)))?;
                evaluations += est.evaluations;
                est.value
            }
        };
        Ok(k * angular)
    };
    let est = try_integrate_semi_infinite(&mut radial, spec)?;
    let norm = 1.0 / (4.0 * PI * PI);
    Ok(Estimate {
        value: est.value * norm,
        error: est.error * norm,
        evaluations,
    })
}

pub fn integrate_polar_2d<G>(mut g: G, spec: &QuadratureSpec, options: &PolarOptions) -> Result<Estimate>
where
    G: FnMut(f64, f64) -> f64,
{
    try_integrate_polar_2d(|k, t| Ok(g(k, t)), spec, options)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::ZETA3;

    fn zeta(s: i32, terms: usize) -> f64 {
        (1..=terms).rev().map(|n| 1.0 / (n as f64).powi(s)).sum()
    }

    #[test]
    fn kronrod_rule_is_exact_for_degree_31() {
        let mut f = |x: f64| Ok(x.powi(30) + x.powi(29));
        let p = gk21(&mut f, -1.0, 1.0).unwrap();
        assert!((p.value - 2.0 / 31.0).abs() < 1e-15);
    }

    #[test]
    fn exponential_decay() {
        let est = integrate_semi_infinite(|x| (-x).exp(), &QuadratureSpec::default()).unwrap();
        assert!((est.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_kernel_gives_minus_zeta3() {
        // x ln(1 - e^{-x}) → -ζ(3); oracle: -Σ 1/n³
        let oracle = -zeta(3, 200_000);
        let est = integrate_semi_infinite(
            |x| if x == 0.0 { 0.0 } else { x * (-(-x).exp_m1()).ln() },
            &QuadratureSpec::default().with_relative_tolerance(1e-10),
        )
        .unwrap();
        assert!((est.value - oracle).abs() < 1e-9 * oracle.abs(), "{}", est.value);
        assert!((est.value + ZETA3).abs() < 1e-9);
    }

    #[test]
    fn bose_kernel_gives_pi4_over_15() {
        let oracle = 6.0 * zeta(4, 100_000);
        let est = integrate_semi_infinite(
            |x| if x == 0.0 { 0.0 } else { x.powi(3) / x.exp_m1() },
            &QuadratureSpec::default().with_relative_tolerance(1e-10),
        )
        .unwrap();
        assert!((est.value - oracle).abs() < 1e-9 * oracle);
        assert!((est.value - PI.powi(4) / 15.0).abs() < 1e-9);
    }

    #[test]
    fn scale_is_respected() {
        let s = 3.7e-8;
        let spec = QuadratureSpec::default().with_scale(s);
        let est = integrate_semi_infinite(|x| (-x / s).exp() / s, &spec).unwrap();
        assert!((est.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn non_convergence_reports_best_estimate() {
        let spec = QuadratureSpec {
            max_subdivisions: 2,
            relative_tolerance: 1e-14,
            ..Default::default()
        };
        let err = integrate_interval(|x: f64| (1.0 / x.max(1e-300)).sqrt(), 0.0, 1.0, &spec)
            .unwrap_err();
        match err {
            Error::NonConvergence { estimate, error, .. } => {
                assert!(estimate > 1.0 && estimate < 2.1);
                assert!(error > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_spec_rejected() {
        let spec = QuadratureSpec {
            relative_tolerance: 0.0,
            ..Default::default()
        };
        assert!(integrate_interval(|x| x, 0.0, 1.0, &spec).is_err());
    }

    #[test]
    fn polar_examples() {
        let spec = QuadratureSpec::default().with_relative_tolerance(1e-10);
        let iso = PolarOptions {
            symmetry: AngularSymmetry::Isotropic,
            ..Default::default()
        };
        let est = integrate_polar_2d(|k, _| (-k).exp(), &spec, &iso).unwrap();
        assert!((est.value - 1.0 / (2.0 * PI)).abs() < 1e-12);

        for symmetry in [AngularSymmetry::None, AngularSymmetry::HalfPeriod] {
            let opts = PolarOptions {
                symmetry,
                ..Default::default()
            };
            let est = integrate_polar_2d(|k, t| (-k).exp() * t.cos().powi(2), &spec, &opts).unwrap();
            assert!((est.value - 1.0 / (4.0 * PI)).abs() < 1e-12);
        }
    }

    #[test]
    fn polar_thermal_kernel() {
        let d = 100e-9;
        let spec = QuadratureSpec::default()
            .with_relative_tolerance(1e-10)
            .with_scale(1.0 / (2.0 * d));
        let iso = PolarOptions {
            symmetry: AngularSymmetry::Isotropic,
            ..Default::default()
        };
        let est = integrate_polar_2d(
            |k, _| (-(-2.0 * d * k).exp_m1()).ln(),
            &spec,
            &iso,
        )
        .unwrap();
        let oracle = -zeta(3, 200_000) / (16.0 * PI * d * d) * 2.0;
        assert!((est.value / oracle - 1.0).abs() < 1e-9);
    }

    #[test]
    fn repeated_calls_are_bit_identical() {
        let spec = QuadratureSpec::default().with_scale(0.3);
        let f = |x: f64| (x * 7.0).sin().powi(2) * (-x).exp() / (1.0 + x * x);
        let a = integrate_semi_infinite(f, &spec).unwrap();
        let b = integrate_semi_infinite(f, &spec).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        let opts = PolarOptions {
            symmetry: AngularSymmetry::HalfPeriod,
            angular_breakpoints: vec![0.4],
            ..Default::default()
        };
        let g = |k: f64, t: f64| (-k).exp() * (1.0 + (2.0 * t).cos().abs());
        let a = integrate_polar_2d(g, &spec, &opts).unwrap();
        let b = integrate_polar_2d(g, &spec, &opts).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }
}
