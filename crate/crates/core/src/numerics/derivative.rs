//! Five-point central differences.

use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub value: f64,
    /// O(h⁴) truncation estimate: difference between the five-point and the
    /// three-point stencils, scaled by 1/4 (Richardson).
    pub error: f64,
}

/// `f'(x)` from `f(x ± h)`, `f(x ± 2h)`.
pub fn central_derivative<F>(mut f: F, x: f64, h: f64) -> Result<Derivative>
where
    F: FnMut(f64) -> Result<f64>,
{
    let fp1 = f(x + h)?;
    let fm1 = f(x - h)?;
    let fp2 = f(x + 2.0 * h)?;
    let fm2 = f(x - 2.0 * h)?;
    let five = (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * h);
    let three = (fp1 - fm1) / (2.0 * h);
    Ok(Derivative {
        value: five,
        error: 0.25 * (five - three).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_at_origin() {
        let d = central_derivative(|x| Ok(x.sin()), 0.0, 1e-2).unwrap();
        assert!((d.value - 1.0).abs() < 1e-8);
        assert!(d.error < 1e-4);
    }

    #[test]
    fn quadratic_is_exact() {
        let d = central_derivative(|x| Ok(x * x), 3.0, 0.1).unwrap();
        assert!((d.value - 6.0).abs() < 1e-12);
    }

    #[test]
    fn quartic_error_order() {
        // error of the five-point rule on exp scales as h⁴
        let e1 = (central_derivative(|x| Ok(x.exp()), 0.0, 0.1).unwrap().value - 1.0).abs();
        let e2 = (central_derivative(|x| Ok(x.exp()), 0.0, 0.05).unwrap().value - 1.0).abs();
        assert!((e1 / e2 - 16.0).abs() < 1.0, "{}", e1 / e2);
    }
}
