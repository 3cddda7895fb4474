//! Complex Gamma-family functions.
//!
//! `log_gamma` and `digamma` use the Stirling series on `Re w >= 10`, reached
//! from smaller arguments by the upward recurrence. `log_gamma` returns the
//! branch that is continuous from the positive real axis (the sum of
//! principal logarithms along the recurrence), so `exp(log_gamma(z)) = Γ(z)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A point of the complex plane.
pub type ComplexPoint = Complex64;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_7;
const STIRLING_SHIFT: f64 = 10.0;

// B_{2k} for k = 1..=10.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

fn check_pole(z: ComplexPoint) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite argument {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::GammaPole(z.re));
    }
    Ok(())
}

fn shift_count(z: ComplexPoint) -> usize {
    if z.re >= STIRLING_SHIFT {
        0
    } else {
        (STIRLING_SHIFT - z.re).ceil() as usize
    }
}

fn stirling_log_gamma(w: ComplexPoint) -> ComplexPoint {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut term = inv;
    let mut series = Complex64::new(0.0, 0.0);
    for (k, b) in BERNOULLI.iter().enumerate() {
        let two_k = 2.0 * (k as f64 + 1.0);
        series += term * (b / (two_k * (two_k - 1.0)));
        term *= inv2;
    }
    (w - 0.5) * w.ln() - w + HALF_LN_2PI + series
}

fn stirling_digamma(w: ComplexPoint) -> ComplexPoint {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut term = inv2;
    let mut series = Complex64::new(0.0, 0.0);
    for (k, b) in BERNOULLI.iter().enumerate() {
        let two_k = 2.0 * (k as f64 + 1.0);
        series += term * (b / two_k);
        term *= inv2;
    }
    w.ln() - 0.5 * inv - series
}

/// Logarithm of the Gamma function on the plane minus the poles.
pub fn log_gamma(z: ComplexPoint) -> Result<ComplexPoint> {
    check_pole(z)?;
    let shift = shift_count(z);
    let mut correction = Complex64::new(0.0, 0.0);
    for k in 0..shift {
        correction += (z + k as f64).ln();
    }
    Ok(stirling_log_gamma(z + shift as f64) - correction)
}

/// Digamma ψ = Γ'/Γ.
pub fn digamma(z: ComplexPoint) -> Result<ComplexPoint> {
    check_pole(z)?;
    let shift = shift_count(z);
    let mut correction = Complex64::new(0.0, 0.0);
    for k in 0..shift {
        correction += (z + k as f64).inv();
    }
    Ok(stirling_digamma(z + shift as f64) - correction)
}

/// The entire function 1/Γ(s); exactly zero at s = 0, -1, -2, ...
pub fn recip_gamma(s: ComplexPoint) -> ComplexPoint {
    if s.im == 0.0 && s.re <= 0.0 && s.re == s.re.round() {
        return Complex64::new(0.0, 0.0);
    }
    if s.re < 0.5 {
        // 1/Γ(s) = sin(πs) Γ(1-s) / π
        let pi = std::f64::consts::PI;
        let lg = log_gamma(1.0 - s).expect("1 - s is not a pole when Re s < 0.5");
        (s * pi).sin() * lg.exp() / pi
    } else {
        (-log_gamma(s).expect("Re s >= 0.5 has no poles")).exp()
    }
}

/// `e^z - 1` without cancellation for small `|z|`.
pub fn expm1(z: ComplexPoint) -> ComplexPoint {
    if z.norm() >= 0.5 {
        return z.exp() - 1.0;
    }
    // Taylor series; 0.5^20/20! is far below double precision
    let mut sum = Complex64::new(0.0, 0.0);
    for k in (1..=20).rev() {
        sum = z / k as f64 * (sum + 1.0);
    }
    sum
}

/// Real convenience wrapper around [`log_gamma`] for positive arguments.
pub fn ln_gamma_real(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    log_gamma(Complex64::new(x, 0.0))
        .expect("positive real argument")
        .re
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> ComplexPoint {
        Complex64::new(re, im)
    }

    fn rel(a: ComplexPoint, b: ComplexPoint) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn log_gamma_trivial_values() {
        let half = log_gamma(c(0.5, 0.0)).unwrap();
        assert!((half.re - 0.5 * PI.ln()).abs() < 1e-14);
        assert!(half.im.abs() < 1e-15);
        let five = log_gamma(c(5.0, 0.0)).unwrap();
        assert!((five.re - 24f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn log_gamma_matches_high_precision_reference() {
        // 50-digit references (mpmath.loggamma).
        let cases = [
            (c(0.5, 0.3), c(0.377_021_125_610_205_4, -0.525_811_446_659_165_1)),
            (c(-3.7, 2.2), c(-7.259_769_349_970_579_7, -9.940_188_451_078_550_0)),
            (c(12.5, -30.0), c(-5.085_350_339_355_304_7, -88.546_898_270_819_31)),
            (c(0.1, 45.0), c(-71.289_558_205_324_97, 125.670_641_634_015_39)),
        ];
        for (z, expected) in cases {
            let got = log_gamma(z).unwrap();
            assert!(rel(got, expected) < 1e-13, "{z}: {got} vs {expected}");
        }
    }

    #[test]
    fn poles_are_rejected() {
        for z in [0.0, -1.0, -7.0] {
            assert_eq!(log_gamma(c(z, 0.0)), Err(Error::GammaPole(z)));
            assert!(digamma(c(z, 0.0)).is_err());
        }
    }

    #[test]
    fn digamma_values() {
        let one = digamma(c(1.0, 0.0)).unwrap();
        assert!((one.re + EULER_GAMMA).abs() < 1e-14);
        let two = digamma(c(2.0, 0.0)).unwrap();
        assert!((two.re - (1.0 - EULER_GAMMA)).abs() < 1e-14);
        let half = digamma(c(0.5, 0.0)).unwrap();
        assert!((half.re - (-EULER_GAMMA - 2.0 * 2f64.ln())).abs() < 1e-14);
        assert!((half.re + 1.963_510_026_021_423_5).abs() < 1e-14);
        let off = digamma(c(0.7, -1.3)).unwrap();
        assert!(rel(off, c(0.249_080_336_370_289_87, -1.408_435_719_321_472_7)) < 1e-13);
    }

    #[test]
    fn recip_gamma_values() {
        assert_eq!(recip_gamma(c(0.0, 0.0)), c(0.0, 0.0));
        assert_eq!(recip_gamma(c(-3.0, 0.0)), c(0.0, 0.0));
        assert!((recip_gamma(c(1.0, 0.0)) - 1.0).norm() < 1e-15);
        assert!((recip_gamma(c(2.5, 0.0)).re - 0.752_252_778_063_675_1).abs() < 1e-14);
        // continuity through a zero
        assert!(recip_gamma(c(-2.0 + 1e-9, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn expm1_small_and_large() {
        let z = c(1e-12, -2e-12);
        assert!((expm1(z) - z).norm() < 1e-23);
        for z in [c(0.3, -0.2), c(-0.49, 0.0), c(2.0, 1.0)] {
            assert!((expm1(z) - (z.exp() - 1.0)).norm() < 1e-15);
        }
    }

    fn pole_free_grid() -> Vec<ComplexPoint> {
        let mut pts = Vec::new();
        for i in -8..=8 {
            for j in -8..=8 {
                let z = c(2.4 * i as f64 + 0.37, 2.4 * j as f64 + 0.11);
                if z.norm() <= 20.0 {
                    pts.push(z);
                }
            }
        }
        pts
    }

    #[test]
    fn exp_log_gamma_times_recip_is_one() {
        for z in pole_free_grid() {
            let prod = log_gamma(z).unwrap().exp() * recip_gamma(z);
            assert!((prod - 1.0).norm() < 1e-12, "{z}: {prod}");
        }
    }

    #[test]
    fn digamma_is_derivative_of_log_gamma() {
        let h = 1e-5;
        for z in pole_free_grid() {
            let fd = (log_gamma(z + h).unwrap() - log_gamma(z - h).unwrap()) / (2.0 * h);
            let psi = digamma(z).unwrap();
            assert!((fd - psi).norm() < 1e-6 * psi.norm().max(1.0), "{z}");
        }
    }

    #[test]
    fn digamma_recurrence() {
        for z in pole_free_grid() {
            let lhs = digamma(z + 1.0).unwrap();
            let rhs = digamma(z).unwrap() + z.inv();
            assert!((lhs - rhs).norm() < 1e-12 * lhs.norm().max(1.0), "{z}");
        }
    }
}
