//! Degradation functions and their first two derivatives in d.

use super::ConstitutiveError;

/// Value and derivatives of a scalar degradation function at one d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Degradation {
    pub g: f64,
    pub dg: f64,
    pub d2g: f64,
}

fn check_d(d: f64) -> Result<(), ConstitutiveError> {
    if !(0.0..=1.0).contains(&d) {
        return Err(ConstitutiveError::InvalidInput(format!("phase field d = {d} outside [0, 1]")));
    }
    Ok(())
}

/// g(d) = (1−d)² + k.
pub fn degradation(d: f64, k: f64) -> Result<f64, ConstitutiveError> {
    check_d(d)?;
    Ok(quadratic(d, k).g)
}

pub(crate) fn quadratic(d: f64, k: f64) -> Degradation {
    let x = 1.0 - d;
    Degradation { g: x * x + k, dg: -2.0 * x, d2g: 2.0 }
}

/// g_s(d) = 1 + [(1−d)² − 1](a(1−d)² + b(1−d) + 1), with no residual.
pub(crate) fn shear(d: f64, a: f64, b: f64) -> Degradation {
    let x = 1.0 - d;
    let p = a * x * x + b * x + 1.0;
    let dp = 2.0 * a * x + b;
    let q = x * x - 1.0;
    // Derivatives in x, then dx/dd = −1.
    let dgx = 2.0 * x * p + q * dp;
    let d2gx = 2.0 * p + 4.0 * x * dp + q * 2.0 * a;
    Degradation { g: 1.0 + q * p, dg: -dgx, d2g: d2gx }
}

/// Shear degradation with coefficients looked up for ν.
pub fn shear_degradation(d: f64, nu: f64, table: &super::ShearFitTable) -> Result<f64, ConstitutiveError> {
    check_d(d)?;
    let (a, b) = table.coefficients(nu)?;
    Ok(shear(d, a, b).g)
}

/// Exponential degradation g(d;b) = (e^{bd} − (b(d−1)+1)e^b)/((b−1)e^b + 1), plus k.
pub(crate) fn exponential(d: f64, b: f64, k: f64) -> Degradation {
    let eb = b.exp();
    let ebd = (b * d).exp();
    let den = (b - 1.0) * eb + 1.0;
    Degradation {
        g: (ebd - (b * (d - 1.0) + 1.0) * eb) / den + k,
        dg: b * (ebd - eb) / den,
        d2g: b * b * ebd / den,
    }
}

/// g(d;b) without residual.
pub fn sk_degradation(d: f64, b: f64) -> Result<f64, ConstitutiveError> {
    check_d(d)?;
    if !b.is_finite() || b.abs() < 1e-8 {
        return Err(ConstitutiveError::InvalidInput(format!("SK parameter b = {b} must be finite and nonzero")));
    }
    Ok(exponential(d, b, 0.0).g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(f: impl Fn(f64) -> Degradation) {
        let h = 1e-6;
        for i in 1..20 {
            let d = i as f64 / 20.0;
            let (lo, mid, hi) = (f(d - h), f(d), f(d + h));
            assert!(((hi.g - lo.g) / (2.0 * h) - mid.dg).abs() < 1e-7);
            assert!(((hi.dg - lo.dg) / (2.0 * h) - mid.d2g).abs() < 1e-6);
        }
    }

    #[test]
    fn quadratic_values() {
        assert_eq!(degradation(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(degradation(1.0, 0.0).unwrap(), 0.0);
        assert!((degradation(0.5, 1e-6).unwrap() - 0.250001).abs() < 1e-15);
        assert!(degradation(1.5, 0.0).is_err());
        assert!(degradation(-0.1, 0.0).is_err());
        fd_check(|d| quadratic(d, 1e-6));
    }

    #[test]
    fn shear_values_and_derivatives() {
        let (a, b) = (0.1281, -0.8783);
        assert_eq!(shear(0.0, a, b).g, 1.0);
        assert_eq!(shear(1.0, a, b).g, 0.0);
        let want = 1.0 + (0.25 - 1.0) * (0.1281 * 0.25 - 0.8783 * 0.5 + 1.0);
        assert!((shear(0.5, a, b).g - want).abs() < 1e-15);
        fd_check(|d| shear(d, a, b));
    }

    #[test]
    fn exponential_endpoints_and_derivatives() {
        for b in [-3.0, -0.5, 0.5, 2.0, 5.0] {
            assert!((sk_degradation(0.0, b).unwrap() - 1.0).abs() < 1e-14);
            assert!(sk_degradation(1.0, b).unwrap().abs() < 1e-14);
            fd_check(|d| exponential(d, b, 0.0));
            for i in 0..20 {
                assert!(exponential(i as f64 / 20.0, b, 0.0).dg <= 1e-14);
            }
        }
        assert!(sk_degradation(0.5, 0.0).is_err());
    }
}
