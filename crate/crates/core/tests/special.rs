use std::f64::consts::PI;

use approx::assert_relative_eq;
use deltagas::special::{digamma, expm1, ln_gamma_real, log_gamma, recip_gamma, EULER_GAMMA};
use deltagas::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn tabulated_values() {
    assert_relative_eq!(ln_gamma_real(0.5), 0.5 * PI.ln(), epsilon = 4e-15);
    assert_relative_eq!(ln_gamma_real(10.0), 362_880f64.ln(), max_relative = 1e-15);
    assert_relative_eq!(ln_gamma_real(1e-3), 6.907_178_885_383_853_7, max_relative = 1e-14);
    let g = log_gamma(c(1.0, 1.0)).unwrap().exp();
    assert_relative_eq!(g.re, 0.498_015_668_118_356_04, epsilon = 5e-15);
    assert_relative_eq!(g.im, -0.154_949_828_301_810_69, epsilon = 5e-15);
    assert_relative_eq!(digamma(c(1.0, 0.0)).unwrap().re, -EULER_GAMMA, epsilon = 1e-15);
    let half = digamma(c(0.5, 0.0)).unwrap();
    assert_relative_eq!(half.re, -EULER_GAMMA - 2.0 * 2f64.ln(), epsilon = 1e-14);
}

#[test]
fn poles() {
    assert_eq!(log_gamma(c(-3.0, 0.0)), Err(Error::GammaPole(-3.0)));
    assert!(matches!(digamma(c(0.0, 0.0)), Err(Error::GammaPole(_))));
    assert_eq!(recip_gamma(c(-2.0, 0.0)), c(0.0, 0.0));
    assert!(log_gamma(c(-3.0, 1e-9)).is_ok());
}

#[test]
fn expm1_small_and_large() {
    let z = c(1e-10, -2e-10);
    let e = expm1(z);
    assert_relative_eq!(e.re, 1e-10 + 0.5 * (1e-20 - 4e-20), max_relative = 1e-15);
    assert_relative_eq!(e.im, -2e-10 + 0.5 * (-4e-20), max_relative = 1e-15);
    let w = c(0.49, 0.01);
    let d = expm1(w) - (w.exp() - 1.0);
    assert!(d.norm() < 1e-15);
}

proptest! {
    #[test]
    fn reciprocal_identity(re in -8.0f64..8.0, im in -8.0f64..8.0) {
        prop_assume!(im.abs() > 1e-3 || re > 0.0 || (re - re.round()).abs() > 1e-3);
        let s = c(re, im);
        let g = log_gamma(s).unwrap().exp();
        prop_assert!((recip_gamma(s) * g - 1.0).norm() < 1e-11);
    }

    #[test]
    fn recurrence(re in 0.05f64..20.0, im in -30.0f64..30.0) {
        let z = c(re, im);
        let lhs = log_gamma(z + 1.0).unwrap() - log_gamma(z).unwrap();
        let rhs = z.ln();
        // equal up to a multiple of 2πi
        let d = lhs - rhs;
        prop_assert!(d.re.abs() < 1e-12 * (1.0 + rhs.norm()));
        let k = (d.im / (2.0 * PI)).round();
        prop_assert!((d.im - 2.0 * PI * k).abs() < 1e-11 * (1.0 + z.norm()));
        let dpsi = digamma(z + 1.0).unwrap() - digamma(z).unwrap() - z.inv();
        prop_assert!(dpsi.norm() < 1e-12 * (1.0 + z.inv().norm()));
    }

    #[test]
    fn half_line_modulus(y in -40.0f64..40.0) {
        // |Γ(1/2 + iy)|² = π / cosh(πy)
        let lg = log_gamma(c(0.5, y)).unwrap();
        let expected = 0.5 * (PI.ln() - (PI * y).cosh().ln());
        prop_assert!((lg.re - expected).abs() < 1e-12 * (1.0 + expected.abs()));
    }

    #[test]
    fn conjugate_symmetry(re in 0.1f64..10.0, im in 0.0f64..20.0) {
        let z = c(re, im);
        let a = log_gamma(z).unwrap();
        let b = log_gamma(z.conj()).unwrap();
        prop_assert!((a - b.conj()).norm() < 1e-13 * (1.0 + a.norm()));
    }
}
