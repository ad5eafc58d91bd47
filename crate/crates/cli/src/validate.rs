//! Quick invariant suite behind the `validate` verb.

use std::f64::consts::{FRAC_PI_8, PI};

use cnt_casimir::film::Sheet;
use cnt_casimir::lifshitz::{CasimirPoint, FilmPair, Mode};
use cnt_casimir::numerics::{
    bessel_i0, bessel_k0, central_derivative, integrate_semi_infinite, kk_to_imaginary_axis, matsubara_sum,
    MatsubaraSpec, QuadratureSpec, SpectralSamples, SpectralTail,
};
use cnt_casimir::units::ZETA3;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self { name, passed, detail }
    }

    fn failed(name: &'static str, err: impl std::fmt::Display) -> Self {
        Self::new(name, false, format!("error: {err}"))
    }

    pub fn line(&self) -> String {
        format!("[{}] {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

/// Runs the invariant checks against `films` (plus numerics oracles).
pub fn run(films: &FilmPair) -> Vec<Check> {
    vec![
        thermal_closed_form(films),
        thermal_torque(films),
        ideal_metal(),
        symmetries(films),
        torque_derivative(films),
        numerics(),
    ]
}

fn thermal_closed_form(films: &FilmPair) -> Check {
    let name = "thermal n = 0 energy equals -zeta(3) kT/(16 pi D^2)";
    let mut worst = 0.0f64;
    for d in [10.0, 100.0, 1000.0] {
        for t in [30.0, 300.0] {
            let pt = CasimirPoint::new(d, 0.4, t, Mode::Thermal);
            match films.energy(&pt) {
                Ok(e) => worst = worst.max(rel(e.value, pt.e_t())),
                Err(e) => return Check::failed(name, e),
            }
        }
    }
    Check::new(name, worst < 1e-6, format!("max relative deviation {worst:.2e} (tolerance 1e-6)"))
}

fn thermal_torque(films: &FilmPair) -> Check {
    let name = "thermal n = 0 torque is exactly zero";
    for phi in [0.1, FRAC_PI_8, 1.0, 2.5] {
        match films.torque(&CasimirPoint::new(100.0, phi, 300.0, Mode::Thermal)) {
            Ok(t) if t.value != 0.0 => return Check::new(name, false, format!("torque {:e} at phi = {phi}", t.value)),
            Ok(_) => {}
            Err(e) => return Check::failed(name, e),
        }
    }
    Check::new(name, true, "0 at 4 angles".into())
}

fn ideal_metal() -> Check {
    let name = "perfect-conductor surrogate gives E/E_M = 1 at D = 1 um";
    let films = FilmPair::identical(Sheet::perfect_conductor());
    match films.energy(&CasimirPoint::new(1000.0, 0.0, 0.0, Mode::Quantum)) {
        Ok(e) => {
            let r = e.value / CasimirPoint::new(1000.0, 0.0, 0.0, Mode::Quantum).e_m();
            Check::new(name, (0.99..=1.01).contains(&r), format!("E/E_M = {r:.6}"))
        }
        Err(e) => Check::failed(name, e),
    }
}

fn symmetries(films: &FilmPair) -> Check {
    let name = "E(phi) = E(phi + pi) = E(-phi), T(-phi) = -T(phi)";
    let d = 316.0;
    let phi = 0.7;
    let at = |p: f64| films.evaluate(&CasimirPoint::new(d, p, 0.0, Mode::Quantum));
    match (at(phi), at(phi + PI), at(-phi)) {
        (Ok(a), Ok(b), Ok(c)) => {
            let worst = rel(b.energy, a.energy)
                .max(rel(c.energy, a.energy))
                .max(rel(-c.torque, a.torque));
            Check::new(name, worst < 1e-6, format!("max relative deviation {worst:.2e} at D = {d} nm"))
        }
        (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => Check::failed(name, e),
    }
}

fn torque_derivative(films: &FilmPair) -> Check {
    let name = "torque equals -dE/dphi";
    let (d, phi) = (100.0, FRAC_PI_8);
    let t = match films.torque(&CasimirPoint::new(d, phi, 0.0, Mode::Quantum)) {
        Ok(t) => t.value,
        Err(e) => return Check::failed(name, e),
    };
    match central_derivative(
        |p| Ok(films.energy(&CasimirPoint::new(d, p, 0.0, Mode::Quantum))?.value),
        phi,
        1e-2,
    ) {
        Ok(de) => {
            let r = rel(-de.value, t);
            Check::new(name, r < 1e-3, format!("relative deviation {r:.2e} at D = {d} nm, phi = pi/8"))
        }
        Err(e) => Check::failed(name, e),
    }
}

fn numerics() -> Check {
    let name = "numerics oracles (Bessel, zeta(3) integral, Drude transform, geometric sum)";
    let run = || -> cnt_casimir::Result<f64> {
        let mut worst = 0.0f64;
        worst = worst.max(rel(bessel_i0(1.0)?, 1.266_065_877_752_008_4));
        worst = worst.max(rel(bessel_k0(1.0)?, 0.421_024_438_240_708_3));
        let z = integrate_semi_infinite(|x| x * (-(-x).exp()).ln_1p(), &QuadratureSpec::default())?;
        worst = worst.max(rel(-z.value, ZETA3));
        let tau = 1e-13;
        let omega: Vec<f64> = std::iter::once(0.0)
            .chain((0..20_000).map(|i| 1e-5 / tau * 1e10f64.powf(i as f64 / 19_999.0)))
            .collect();
        let re: Vec<f64> = omega.iter().map(|w| 1.0 / (1.0 + (w * tau).powi(2))).collect();
        let s = SpectralSamples::new(omega, re, SpectralTail::InverseSquare)?;
        for xt in [0.1, 1.0, 10.0] {
            worst = worst.max(rel(kk_to_imaginary_axis(&s, xt / tau)?, 1.0 / (1.0 + xt)));
        }
        let spec = MatsubaraSpec {
            tail_tolerance: 1e-12,
            ..MatsubaraSpec::new(1.0)
        };
        let q: f64 = 0.5;
        let sum = matsubara_sum(|n| Ok(q.powi(n as i32)), &spec)?;
        let exact = spec.thermal_energy() * (1.0 / (1.0 - q) - 0.5);
        worst = worst.max(rel(sum.value, exact));
        Ok(worst)
    };
    match run() {
        Ok(w) => Check::new(name, w < 1e-6, format!("max relative deviation {w:.2e} (tolerance 1e-6)")),
        Err(e) => Check::failed(name, e),
    }
}
