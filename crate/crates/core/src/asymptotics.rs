//! Weak-coupling series, evaluated exactly as printed, and the log-log slope
//! fit used to read convergence orders off residual sweeps.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::EULER_GAMMA;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    Kappa,
    Gamma,
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    ToZero,
    ToInfinity,
}

/// One term `c · x^{num/den} · (log x)^m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub num: i32,
    pub den: u32,
    pub log_power: u32,
    pub coeff: f64,
}

impl Term {
    pub fn new(num: i32, den: u32, log_power: u32, coeff: f64) -> Self {
        Self { num, den, log_power, coeff }
    }

    pub fn power(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeff * x.powf(self.power()) * x.ln().powi(self.log_power as i32)
    }
}

/// A finite asymptotic series, terms ordered from dominant to subdominant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticSeries {
    pub variable: Variable,
    pub direction: Direction,
    terms: Vec<Term>,
}

impl AsymptoticSeries {
    pub fn new(variable: Variable, direction: Direction, mut terms: Vec<Term>) -> Self {
        // x^p log^m x: smaller p dominates at 0, larger p at ∞; within a
        // power the higher log power dominates either way
        terms.sort_by(|a, b| {
            let by_power = a.power().partial_cmp(&b.power()).unwrap();
            let by_power = match direction {
                Direction::ToZero => by_power,
                Direction::ToInfinity => by_power.reverse(),
            };
            by_power.then(b.log_power.cmp(&a.log_power))
        });
        Self { variable, direction, terms }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_prefix(x, self.terms.len())
    }

    /// Sum of the `k` most dominant terms.
    pub fn eval_prefix(&self, x: f64, k: usize) -> f64 {
        self.terms.iter().take(k).map(|t| t.eval(x)).sum()
    }
}

/// `Q ~ 1/π + (κ/2π²) log κ⁻¹ + (κ/2π²)(log π + 1)` as κ → 0.
pub fn q_series_terms() -> AsymptoticSeries {
    let c = 1.0 / (2.0 * PI * PI);
    AsymptoticSeries::new(
        Variable::Kappa,
        Direction::ToZero,
        vec![
            Term::new(0, 1, 0, 1.0 / PI),
            Term::new(1, 1, 1, -c),
            Term::new(1, 1, 0, c * (PI.ln() + 1.0)),
        ],
    )
}

pub fn q_series(kappa: f64) -> f64 {
    q_series_terms().eval(kappa)
}

/// `ε_F ~ π²/12 - γ/2` as γ → 0.
pub fn ef_series_terms() -> AsymptoticSeries {
    AsymptoticSeries::new(
        Variable::Gamma,
        Direction::ToZero,
        vec![Term::new(0, 1, 0, PI * PI / 12.0), Term::new(1, 1, 0, -0.5)],
    )
}

pub fn ef_series(gamma: f64) -> f64 {
    ef_series_terms().eval(gamma)
}

/// `ε_B ~ γ - (4/3π)γ^{3/2} + (1/6 - 1/π²)γ²` as γ → 0.
pub fn eb_series_terms() -> AsymptoticSeries {
    AsymptoticSeries::new(
        Variable::Gamma,
        Direction::ToZero,
        vec![
            Term::new(1, 1, 0, 1.0),
            Term::new(3, 2, 0, -4.0 / (3.0 * PI)),
            Term::new(2, 1, 0, 1.0 / 6.0 - 1.0 / (PI * PI)),
        ],
    )
}

pub fn eb_series(gamma: f64) -> f64 {
    eb_series_terms().eval(gamma)
}

/// `∫_{-r/2}^{r/2} f ~ r + (1/π)(log r + log(π/2) + 1)` as r → ∞.
pub fn fint_series_terms() -> AsymptoticSeries {
    AsymptoticSeries::new(
        Variable::R,
        Direction::ToInfinity,
        vec![
            Term::new(1, 1, 0, 1.0),
            Term::new(0, 1, 1, 1.0 / PI),
            Term::new(0, 1, 0, ((0.5 * PI).ln() + 1.0) / PI),
        ],
    )
}

pub fn fint_series(r: f64) -> f64 {
    fint_series_terms().eval(r)
}

/// Leading large-r behaviour of the Laurent coefficients `g_k⁺`, k = 0, 1, 2.
/// `g_1⁺` is purely imaginary and is returned as its imaginary part.
pub fn gplus_coeffs(r: f64) -> [f64; 3] {
    let log = r.ln();
    [
        (log + (0.5 * PI).ln() + 1.0) / (2.0 * PI),
        -r * (log + EULER_GAMMA - 1.0) / (2.0 * PI),
        -r * r * (log + EULER_GAMMA - 1.5) / (4.0 * PI),
    ]
}

/// The ξ² coefficient of `f̂`, to the order it is known:
/// `-r³/24 - (r²/8π)(log r + log(π/2) - 1)`.
pub fn xi2_coefficient_series(r: f64) -> f64 {
    -r.powi(3) / 24.0 - r * r / (8.0 * PI) * (r.ln() + (0.5 * PI).ln() - 1.0)
}

/// `ε_F` rebuilt from the series: `-2π² · xi2(r) / fint(r)³`, at `γ ≈ π/r`.
pub fn ef_reconstruction(r: f64) -> f64 {
    -2.0 * PI * PI * xi2_coefficient_series(r) / fint_series(r).powi(3)
}

/// Slope of `log|residual|` against `log x` with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
}

/// Least-squares fit of `log|residual| = intercept + slope · log x`.
pub fn fit_order(xs: &[f64], residuals: &[f64]) -> Result<OrderFit> {
    if xs.len() != residuals.len() {
        return Err(Error::DegenerateFit(format!("{} abscissae, {} residuals", xs.len(), residuals.len())));
    }
    if xs.len() < 4 {
        return Err(Error::DegenerateFit(format!("need at least 4 points, got {}", xs.len())));
    }
    if xs.iter().any(|x| !(*x > 0.0)) {
        return Err(Error::DegenerateFit("abscissae must be positive".into()));
    }
    if residuals.iter().any(|r| *r == 0.0 || !r.is_finite()) {
        return Err(Error::DegenerateFit("zero or non-finite residual".into()));
    }
    let u: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let v: Vec<f64> = residuals.iter().map(|r| r.abs().ln()).collect();
    let n = u.len() as f64;
    let mean_u = u.iter().sum::<f64>() / n;
    let mean_v = v.iter().sum::<f64>() / n;
    let suu: f64 = u.iter().map(|a| (a - mean_u).powi(2)).sum();
    if suu == 0.0 {
        return Err(Error::DegenerateFit("all abscissae coincide".into()));
    }
    let suv: f64 = u.iter().zip(&v).map(|(a, b)| (a - mean_u) * (b - mean_v)).sum();
    let slope = suv / suu;
    let intercept = mean_v - slope * mean_u;
    let sse: f64 = u.iter().zip(&v).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let stderr = (sse / (n - 2.0) / suu).sqrt();
    Ok(OrderFit { slope, stderr, intercept })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_arithmetic() {
        let q = 1.0 / PI + 0.1 / (2.0 * PI * PI) * (10f64.ln() + PI.ln() + 1.0);
        assert!((q_series(0.1) - q).abs() < 1e-15);
        assert!((q_series(0.1) - 0.340_840_247_068_126_5).abs() < 1e-15);
        assert!((ef_series(0.1) - (PI * PI / 12.0 - 0.05)).abs() < 1e-15);
        let eb = 0.25 - 4.0 / (3.0 * PI) * 0.125 + (1.0 / 6.0 - 1.0 / (PI * PI)) * 0.0625;
        assert!((eb_series(0.25) - eb).abs() < 1e-15);
        let fint = 20.0 + (20f64.ln() + (PI / 2.0).ln() + 1.0) / PI;
        assert!((fint_series(20.0) - fint).abs() < 1e-13);
        let g = gplus_coeffs(20.0);
        assert!((g[0] - (20f64.ln() + (PI / 2.0).ln() + 1.0) / (2.0 * PI)).abs() < 1e-15);
        assert!((g[2] + 400.0 / (4.0 * PI) * (20f64.ln() + EULER_GAMMA - 1.5)).abs() < 1e-12);
    }

    #[test]
    fn leading_terms() {
        assert!((q_series(1e-12) - 1.0 / PI).abs() < 1e-10);
        assert!((ef_series(0.0) - PI * PI / 12.0).abs() < 1e-16);
        assert!((xi2_coefficient_series(1e6) / (-1e18 / 24.0) - 1.0).abs() < 2e-5);
        assert_eq!(fint_series_terms().eval_prefix(50.0, 1), 50.0);
    }

    #[test]
    fn terms_sorted_by_dominance() {
        let q = q_series_terms();
        assert_eq!(q.terms()[0].num, 0);
        assert_eq!(q.terms()[1].log_power, 1);
        let f = fint_series_terms();
        assert_eq!(f.terms()[0].num, 1);
        assert_eq!(f.terms()[1].log_power, 1);
        let b = eb_series_terms();
        assert_eq!((b.terms()[1].num, b.terms()[1].den), (3, 2));
    }

    #[test]
    fn reconstruction_reproduces_low_order_energy() {
        // γ⁰ and γ¹ terms agree; the rest is O(γ² log² γ)
        let r = 1e4;
        let gamma = PI / r;
        assert!((ef_reconstruction(r) - ef_series(gamma)).abs() < 2e-6);
    }

    #[test]
    fn fit_exact_powers() {
        let xs = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3];
        let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let fit = fit_order(&xs, &sq).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12 && fit.stderr < 1e-12);
        let flat = fit_order(&xs, &[0.3; 5]).unwrap();
        assert!(flat.slope.abs() < 1e-14);
    }

    #[test]
    fn fit_degenerate_inputs() {
        assert!(matches!(fit_order(&[1.0, 2.0, 3.0, 4.0], &[1.0, 0.0, 1.0, 1.0]), Err(Error::DegenerateFit(_))));
        assert!(matches!(fit_order(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0]), Err(Error::DegenerateFit(_))));
    }
}
