//! Zeroth-order modified Bessel functions `I₀` and `K₀`.
//!
//! Power series below the crossover, Hankel asymptotics above it for `I₀`,
//! and Temme's continued fraction (CF2) for `K₀` at moderate and large
//! arguments. Target accuracy is 1e-10 relative; in practice ~1e-14.

use std::f64::consts::PI;

use crate::units::EULER_GAMMA;
use crate::{Error, Result};

const I0_SERIES_MAX: f64 = 15.0;
const K0_SERIES_MAX: f64 = 2.0;
/// `exp(x)` overflows beyond this.
const EXP_MAX: f64 = 709.78;

/// `I₀(x)` for finite `x ≥ 0`.
pub fn bessel_i0(x: f64) -> Result<f64> {
    check_nonnegative("bessel_i0", x)?;
    if x <= I0_SERIES_MAX {
        return Ok(i0_series(x));
    }
    if x > EXP_MAX {
        return Err(Error::Overflow {
            function: "bessel_i0",
            value: x,
        });
    }
    Ok(i0_asymptotic_scaled(x) * x.exp())
}

/// Exponentially scaled `e^{-x} I₀(x)`; never overflows.
pub fn bessel_i0e(x: f64) -> Result<f64> {
    check_nonnegative("bessel_i0e", x)?;
    if x <= I0_SERIES_MAX {
        Ok(i0_series(x) * (-x).exp())
    } else {
        Ok(i0_asymptotic_scaled(x))
    }
}

/// `K₀(x)` for `x > 0`.
pub fn bessel_k0(x: f64) -> Result<f64> {
    check_positive("bessel_k0", x)?;
    if x <= K0_SERIES_MAX {
        Ok(k0_series(x))
    } else {
        Ok(k0_cf2_scaled(x) * (-x).exp())
    }
}

/// Exponentially scaled `e^{x} K₀(x)`.
pub fn bessel_k0e(x: f64) -> Result<f64> {
    check_positive("bessel_k0e", x)?;
    if x <= K0_SERIES_MAX {
        Ok(k0_series(x) * x.exp())
    } else {
        Ok(k0_cf2_scaled(x))
    }
}

/// The product `I₀(x) K₀(x)`, evaluated without intermediate overflow.
pub fn bessel_i0k0(x: f64) -> Result<f64> {
    check_positive("bessel_i0k0", x)?;
    if x <= K0_SERIES_MAX {
        let (i0, k0) = i0_k0_series(x);
        return Ok(i0 * k0);
    }
    Ok(bessel_i0e(x)? * bessel_k0e(x)?)
}

fn check_nonnegative(function: &'static str, x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain {
            function,
            value: x,
            reason: "must be finite and >= 0",
        });
    }
    Ok(())
}

fn check_positive(function: &'static str, x: f64) -> Result<()> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain {
            function,
            value: x,
            reason: "must be finite and > 0",
        });
    }
    Ok(())
}

fn i0_series(x: f64) -> f64 {
    let y = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while term > sum * 1e-17 {
        term *= y / (k * k);
        sum += term;
        k += 1.0;
    }
    sum
}

/// `e^{-x} I₀(x) ~ (2πx)^{-1/2} Σ ((2k-1)!!)² / (k! (8x)^k)`, summed until the
/// terms stop shrinking.
fn i0_asymptotic_scaled(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        let next = term * (2.0 * kf - 1.0).powi(2) / (8.0 * kf * x);
        if next >= term {
            break;
        }
        term = next;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

fn k0_series(x: f64) -> f64 {
    i0_k0_series(x).1
}

/// `(I₀, K₀)` from one pass, using
/// `K₀(x) = -(ln(x/2) + γ) I₀(x) + Σ_{k≥1} (x²/4)^k / (k!)² H_k`.
fn i0_k0_series(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut i0 = 1.0;
    let mut tail = 0.0;
    let mut k = 1.0;
    loop {
        term *= y / (k * k);
        harmonic += 1.0 / k;
        i0 += term;
        tail += term * harmonic;
        if term * harmonic < 1e-18 * tail.abs().max(1e-300) && term < 1e-18 * i0 {
            break;
        }
        k += 1.0;
    }
    (i0, -((0.5 * x).ln() + EULER_GAMMA) * i0 + tail)
}

/// Temme's CF2 for `e^{x} K₀(x)`, valid for x ≳ 2.
fn k0_cf2_scaled(x: f64) -> f64 {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..10_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    (PI / (2.0 * x)).sqrt() / s
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Σ (x/2)^{2k}/(k!)², 30 terms, accumulated smallest-first.
    fn i0_oracle(x: f64) -> f64 {
        let mut terms = Vec::with_capacity(30);
        let mut t = 1.0;
        terms.push(t);
        for k in 1..30 {
            t *= (0.5 * x).powi(2) / (k as f64 * k as f64);
            terms.push(t);
        }
        terms.iter().rev().sum()
    }

    /// ∫₀^∞ exp(-x cosh t) dt by the trapezoidal rule, which converges
    /// geometrically for this doubly-exponentially decaying integrand.
    fn k0_oracle(x: f64) -> f64 {
        let h: f64 = 1.0 / 64.0;
        let mut sum = 0.5 * (-x).exp();
        let mut t = h;
        loop {
            let v = (-x * t.cosh()).exp();
            sum += v;
            if v < 1e-300 || v < sum * 1e-20 {
                break;
            }
            t += h;
        }
        sum * h
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn i0_origin_is_one() {
        assert_eq!(bessel_i0(0.0).unwrap(), 1.0);
    }

    #[test]
    fn i0_matches_series_oracle() {
        for &x in &[0.1, 0.5, 1.0, 2.0, 3.75, 5.0, 8.0, 12.0] {
            let got = bessel_i0(x).unwrap();
            assert!(rel(got, i0_oracle(x)) < 1e-12, "x={x}: {got}");
        }
        assert!((bessel_i0(1.0).unwrap() - 1.266_065_877_752_008_4).abs() < 1e-12);
        assert!((bessel_i0(2.0).unwrap() - 2.279_585_302_336_067).abs() < 1e-12);
    }

    #[test]
    fn i0_branch_continuity() {
        let below = bessel_i0(I0_SERIES_MAX).unwrap();
        let above = i0_asymptotic_scaled(I0_SERIES_MAX) * I0_SERIES_MAX.exp();
        assert!(rel(below, above) < 1e-12, "{below} vs {above}");
    }

    #[test]
    fn i0_large_argument_and_overflow() {
        // e^{-x} I0(x) ~ 1/sqrt(2πx) (1 + 1/(8x) + 9/(128x²))
        let x = 700.0;
        let expected = (1.0 + 1.0 / (8.0 * x) + 9.0 / (128.0 * x * x)) / (2.0 * PI * x).sqrt();
        assert!(rel(bessel_i0e(x).unwrap(), expected) < 1e-9);
        assert!(bessel_i0(700.0).unwrap().is_finite());
        assert!(matches!(bessel_i0(720.0), Err(Error::Overflow { .. })));
        assert!(bessel_i0(-1.0).is_err());
        assert!(bessel_i0(f64::NAN).is_err());
    }

    #[test]
    fn k0_matches_integral_oracle() {
        for &x in &[0.05, 0.3, 1.0, 1.9, 2.0, 2.1, 3.0, 7.0, 20.0, 60.0] {
            let got = bessel_k0(x).unwrap();
            assert!(rel(got, k0_oracle(x)) < 1e-11, "x={x}: {got} vs {}", k0_oracle(x));
        }
        assert!((bessel_k0(1.0).unwrap() - 0.421_024_438_240_708_3).abs() < 1e-12);
        assert!((bessel_k0(2.0).unwrap() - 0.113_893_872_749_533_4).abs() < 1e-12);
    }

    #[test]
    fn k0_log_divergence_and_domain() {
        assert!(bessel_k0(1e-8).unwrap() > 17.0);
        let x: f64 = 1e-6;
        let lim = -(0.5 * x).ln() - EULER_GAMMA;
        assert!(rel(bessel_k0(x).unwrap(), lim) < 1e-10);
        assert!(bessel_k0(0.0).is_err());
        assert!(bessel_k0(-2.0).is_err());
    }

    #[test]
    fn i0k0_product_properties() {
        let mut prev = f64::INFINITY;
        let mut x = 1e-4;
        while x < 200.0 {
            let p = bessel_i0k0(x).unwrap();
            assert!(p > 0.0 && p < prev, "x={x}");
            prev = p;
            x *= 1.3;
        }
        let x = 50.0;
        let limit = x * bessel_i0k0(x).unwrap();
        assert!((limit / 0.5 - 1.0).abs() < 0.01);
    }

    #[test]
    fn monotonicity() {
        let xs: Vec<f64> = (1..400).map(|i| i as f64 * 0.05).collect();
        for w in xs.windows(2) {
            assert!(bessel_i0(w[1]).unwrap() > bessel_i0(w[0]).unwrap());
            assert!(bessel_k0(w[1]).unwrap() < bessel_k0(w[0]).unwrap());
        }
    }
}
