//! Direct Nyström solution of the Love-type equations
//!
//! ```text
//!     f(x) ∓ (κ/π) ∫_{-1}^{1} f(y) / ((x-y)² + κ²) dy = 1,   -1 < x < 1,
//! ```
//!
//! minus sign for the Lieb–Liniger (Bose) equation, plus sign for the Gaudin
//! (Fermi) equation. The Nyström matrix is symmetrized with the square roots
//! of the weights; the Lorentzian kernel is positive definite, so the Fermi
//! matrix is SPD with spectrum in `[1, 2]` and the Bose matrix is SPD exactly
//! when the solve is well posed. Both are factored by Cholesky.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, Domain, QuadratureGrid};

/// Condition estimate above which a Bose solve is refused.
pub const MAX_CONDITION: f64 = 1e12;
/// Relative m0/m2 tolerance used by [`solve_love_checked`].
pub const REFINEMENT_TOL: f64 = 1e-9;
/// Below this κ the grid is a graded composite rule instead of one Gauss rule.
pub const COMPOSITE_BELOW: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    /// Lieb–Liniger equation, `f - L f = 1`.
    Bose,
    /// Gaudin equation, `f + L f = 1`.
    Fermi,
}

impl Statistics {
    /// Sign in front of the integral operator.
    pub fn sign(self) -> f64 {
        match self {
            Statistics::Bose => -1.0,
            Statistics::Fermi => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Statistics::Bose => "bose",
            Statistics::Fermi => "fermi",
        }
    }
}

impl std::str::FromStr for Statistics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bose" | "b" => Ok(Statistics::Bose),
            "fermi" | "f" => Ok(Statistics::Fermi),
            other => Err(Error::InvalidArgument(format!("unknown statistics {other:?}"))),
        }
    }
}

/// The coupling triple. `r = 2/κ` always; `gamma` comes from a solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingParams {
    pub kappa: f64,
    pub r: f64,
    pub gamma: f64,
}

impl CouplingParams {
    pub fn new(kappa: f64, gamma: f64) -> Self {
        Self { kappa, r: 2.0 / kappa, gamma }
    }
}

/// Solver knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub max_condition: f64,
    /// When set, the solve is repeated with twice the nodes and must agree in
    /// m0 and m2 to this relative tolerance.
    pub refinement_tol: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { max_condition: MAX_CONDITION, refinement_tol: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NystromSolution {
    pub stat: Statistics,
    pub params: CouplingParams,
    pub grid: QuadratureGrid,
    pub values: Vec<f64>,
    /// ∫ f
    pub m0: f64,
    /// ∫ x² f
    pub m2: f64,
    /// Estimated 2-norm condition number of the symmetrized system.
    pub condition: f64,
}

/// Node count that resolves the Lorentzian of width κ to near machine precision.
pub fn default_nodes(kappa: f64) -> usize {
    ((16.0 / kappa).ceil() as usize).clamp(64, 6000)
}

/// Breakpoints of the graded composite grid on `[-1, 1]`: panel widths
/// κ/4, κ/2, κ, ... doubling away from each endpoint up to 2κ, uniform inside.
pub fn graded_breaks(kappa: f64) -> Vec<f64> {
    let interior = 2.0 * kappa;
    let mut offsets = vec![0.0];
    let mut h = kappa / 4.0;
    while h < interior && offsets.last().unwrap() + h < 0.5 {
        offsets.push(offsets.last().unwrap() + h);
        h *= 2.0;
    }
    let edge = *offsets.last().unwrap();
    let span = 2.0 - 2.0 * edge;
    let panels = ((span / interior).ceil() as usize).max(1);
    let mut breaks: Vec<f64> = offsets.iter().map(|o| -1.0 + o).collect();
    for i in 1..panels {
        breaks.push(-1.0 + edge + span * i as f64 / panels as f64);
    }
    breaks.extend(offsets.iter().rev().map(|o| 1.0 - o));
    breaks
}

/// Symmetric grid on `[-1, 1]` for the given κ with about `n` nodes.
pub fn love_grid(kappa: f64, n: usize) -> Result<QuadratureGrid> {
    if kappa >= COMPOSITE_BELOW {
        return gauss_legendre(n, -1.0, 1.0);
    }
    let breaks = graded_breaks(kappa);
    let panels = breaks.len() - 1;
    let per_panel = n.div_ceil(panels).max(4);
    QuadratureGrid::composite(&breaks, per_panel, Domain::Finite { a: -1.0, b: 1.0 })
}

fn validate(kappa: f64, n: usize) -> Result<()> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidArgument(format!("kappa must be positive, got {kappa}")));
    }
    if n < 8 {
        return Err(Error::InvalidArgument(format!("n must be at least 8, got {n}")));
    }
    Ok(())
}

/// Solves `f/c_diag + sign·(κ/π)∫ f(y)/((x-y)²+κ²) dy = rhs` on an arbitrary grid.
/// Returns values and the condition estimate.
fn nystrom_on_grid(
    grid: &QuadratureGrid,
    kappa: f64,
    sign: f64,
    max_condition: f64,
) -> Result<(Vec<f64>, f64)> {
    let n = grid.len();
    let x = grid.nodes();
    let sqrt_w: Vec<f64> = grid.weights().iter().map(|w| w.sqrt()).collect();
    let scale = kappa / PI;
    let k2 = kappa * kappa;
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut max_row = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            let d = x[i] - x[j];
            a[(i, j)] = sign * scale * sqrt_w[i] * sqrt_w[j] / (d * d + k2);
        }
    }
    for i in 0..n {
        let row: f64 = (0..n).map(|j| a[(i, j)].abs() * sqrt_w[j] / sqrt_w[i]).sum();
        max_row = max_row.max(row);
        a[(i, i)] += 1.0;
    }
    let chol = match a.cholesky() {
        Some(c) => c,
        None => return Err(Error::SingularSystem { condition: f64::INFINITY }),
    };
    let condition = if sign > 0.0 {
        // spectrum of I + K lies in [1, 1 + ρ(K)], ρ(K) ≤ max row sum of the weighted kernel
        1.0 + max_row
    } else {
        1.0 / smallest_eigenvalue(&chol, n)
    };
    if !(condition <= max_condition) {
        return Err(Error::SingularSystem { condition });
    }
    let rhs = DVector::from_column_slice(&sqrt_w);
    let z = chol.solve(&rhs);
    let values = z.iter().zip(&sqrt_w).map(|(z, s)| z / s).collect();
    Ok((values, condition))
}

// Inverse iteration on an SPD factor; the Bose matrix I - K has λ_max ≤ 1.
fn smallest_eigenvalue(chol: &nalgebra::Cholesky<f64, nalgebra::Dyn>, n: usize) -> f64 {
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut estimate = 0.0;
    for _ in 0..60 {
        let w = chol.solve(&v);
        let norm = w.norm();
        let rayleigh = v.dot(&w);
        v = w / norm;
        let next = 1.0 / rayleigh;
        if (next - estimate).abs() <= 1e-6 * next.abs() {
            return next;
        }
        estimate = next;
    }
    estimate
}

fn moments(grid: &QuadratureGrid, values: &[f64]) -> (f64, f64) {
    grid.iter().zip(values).fold((0.0, 0.0), |(m0, m2), ((x, w), f)| {
        (m0 + w * f, m2 + w * x * x * f)
    })
}

/// γ from κ and ∫f.
fn gamma_of(stat: Statistics, kappa: f64, m0: f64) -> f64 {
    match stat {
        Statistics::Fermi => PI * kappa / (2.0 * m0),
        Statistics::Bose => 2.0 * PI * kappa / m0,
    }
}

/// Nyström solve on [`love_grid`]`(κ, n)`.
pub fn solve_love(stat: Statistics, kappa: f64, n: usize) -> Result<NystromSolution> {
    solve_love_with(stat, kappa, n, SolveOptions::default())
}

/// [`solve_love`] plus an n-doubling check at [`REFINEMENT_TOL`].
pub fn solve_love_checked(stat: Statistics, kappa: f64, n: usize) -> Result<NystromSolution> {
    solve_love_with(
        stat,
        kappa,
        n,
        SolveOptions { refinement_tol: Some(REFINEMENT_TOL), ..SolveOptions::default() },
    )
}

pub fn solve_love_with(
    stat: Statistics,
    kappa: f64,
    n: usize,
    opts: SolveOptions,
) -> Result<NystromSolution> {
    validate(kappa, n)?;
    let grid = love_grid(kappa, n)?;
    let (values, condition) = nystrom_on_grid(&grid, kappa, stat.sign(), opts.max_condition)?;
    let (m0, m2) = moments(&grid, &values);
    if let Some(tol) = opts.refinement_tol {
        let fine = solve_love_with(stat, kappa, 2 * n, SolveOptions { refinement_tol: None, ..opts })?;
        let change = ((fine.m0 - m0) / m0).abs().max(((fine.m2 - m2) / m2).abs());
        if change > tol {
            return Err(Error::NotConverged { change });
        }
    }
    let params = CouplingParams::new(kappa, gamma_of(stat, kappa, m0));
    Ok(NystromSolution { stat, params, grid, values, m0, m2, condition })
}

/// Disc charge `Q = (1/π)∫f`; Fermi only.
pub fn charge_q(sol: &NystromSolution) -> Result<f64> {
    match sol.stat {
        Statistics::Fermi => Ok(sol.m0 / PI),
        Statistics::Bose => Err(Error::WrongStatistics { expected: "fermi" }),
    }
}

/// Fermi: `γ = πκ/(2∫f) = κ/(2Q)`; Bose: `γ = 2πκ/∫f`.
pub fn gamma_from_solution(sol: &NystromSolution) -> f64 {
    gamma_of(sol.stat, sol.params.kappa, sol.m0)
}

/// Dimensionless ground-state energy ε_F(γ) or ε_B(γ).
pub fn energy(sol: &NystromSolution) -> f64 {
    let ratio = gamma_from_solution(sol) / sol.params.kappa;
    let prefactor = match sol.stat {
        Statistics::Fermi => 2.0 / PI,
        Statistics::Bose => 1.0 / (2.0 * PI),
    };
    prefactor * ratio.powi(3) * sol.m2
}

/// Ground-state energy per particle over ρ²: `-γ²/4 + ε_F` for Fermi, `ε_B` for Bose.
pub fn energy_total(sol: &NystromSolution) -> f64 {
    match sol.stat {
        Statistics::Fermi => {
            let g = gamma_from_solution(sol);
            -0.25 * g * g + energy(sol)
        }
        Statistics::Bose => energy(sol),
    }
}

/// Initial κ guess for a target γ, from the weak- and strong-coupling limits.
fn kappa_guess(stat: Statistics, gamma: f64) -> f64 {
    match stat {
        // γ ≈ πκ/2 for small κ, πκ/4 for large κ
        Statistics::Fermi => {
            if gamma < 1.0 {
                2.0 * gamma / PI
            } else {
                4.0 * gamma / PI
            }
        }
        // γ ≈ πκ for large κ, κ ≈ 2√γ/π for small γ
        Statistics::Bose => {
            if gamma > 3.0 {
                gamma / PI
            } else {
                2.0 * gamma.sqrt() / PI
            }
        }
    }
}

/// Finds κ with `gamma_from_solution = γ` (relative 1e-10) and returns that solution.
pub fn solve_for_gamma(stat: Statistics, gamma: f64, n: usize) -> Result<NystromSolution> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidArgument(format!("gamma must be positive, got {gamma}")));
    }
    let residual = |kappa: f64| -> Result<(f64, NystromSolution)> {
        let sol = solve_love(stat, kappa, n)?;
        Ok((gamma_from_solution(&sol) - gamma, sol))
    };
    let guess = kappa_guess(stat, gamma);
    let (mut lo, mut hi) = (0.8 * guess, 1.25 * guess);
    let (mut f_lo, mut sol_lo) = residual(lo)?;
    let (mut f_hi, mut sol_hi) = residual(hi)?;
    let mut expansions = 0;
    while f_lo.signum() == f_hi.signum() {
        expansions += 1;
        if expansions > 40 {
            return Err(Error::BracketFailure { gamma });
        }
        if f_lo > 0.0 {
            // γ(κ) increases with κ; move down
            hi = lo;
            f_hi = f_lo;
            sol_hi = sol_lo;
            lo /= 2.0;
            (f_lo, sol_lo) = residual(lo)?;
        } else {
            lo = hi;
            f_lo = f_hi;
            sol_lo = sol_hi;
            hi *= 2.0;
            (f_hi, sol_hi) = residual(hi)?;
        }
    }
    if f_lo.abs() <= 1e-10 * gamma {
        return Ok(sol_lo);
    }
    if f_hi.abs() <= 1e-10 * gamma {
        return Ok(sol_hi);
    }
    // Illinois regula falsi
    let mut side = 0i8;
    for _ in 0..200 {
        let mid = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        let mid = if mid > lo && mid < hi { mid } else { 0.5 * (lo + hi) };
        let (f_mid, sol_mid) = residual(mid)?;
        if f_mid.abs() <= 1e-10 * gamma || (hi - lo) <= 1e-15 * hi {
            return Ok(sol_mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = mid;
            f_hi = f_mid;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
    }
    Err(Error::BracketFailure { gamma })
}

/// Solution of the rescaled equation
/// `f(x)/2 + (1/2π)∫_{-r/2}^{r/2} f(y)/((x-y)²+1) dy = 1` on `[-r/2, r/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledSolution {
    pub r: f64,
    pub grid: QuadratureGrid,
    pub values: Vec<f64>,
    /// ∫_{-r/2}^{r/2} f
    pub integral: f64,
}

pub fn solve_rescaled(r: f64, n: usize) -> Result<RescaledSolution> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("r must be positive, got {r}")));
    }
    let kappa = 2.0 / r;
    validate(kappa, n)?;
    let grid = love_grid(kappa, n)?.mapped(-0.5 * r, 0.5 * r)?;
    // multiply through by 2: f + (1/π)∫ f/((x-y)²+1) = 2, i.e. unit-width Lorentzian, rhs 2
    let (unit, _) = nystrom_on_grid(&grid, 1.0, 1.0, MAX_CONDITION)?;
    let values: Vec<f64> = unit.iter().map(|v| 2.0 * v).collect();
    let integral = grid.iter().zip(&values).map(|((_, w), f)| w * f).sum();
    Ok(RescaledSolution { r, grid, values, integral })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_breaks_are_symmetric_and_graded() {
        for kappa in [0.04, 0.01, 0.003] {
            let b = graded_breaks(kappa);
            assert_eq!(b[0], -1.0);
            assert_eq!(*b.last().unwrap(), 1.0);
            for i in 0..b.len() {
                assert!((b[i] + b[b.len() - 1 - i]).abs() < 1e-14);
            }
            assert!((b[1] - b[0] - kappa / 4.0).abs() < 1e-15);
            let widest = b.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
            assert!(widest <= 2.0 * kappa * (1.0 + 1e-12));
        }
    }

    #[test]
    fn strong_coupling_fermi_limit() {
        let sol = solve_love(Statistics::Fermi, 100.0, 200).unwrap();
        assert!(sol.values.iter().all(|f| (f - 1.0).abs() < 0.01));
        assert!((sol.m0 - 2.0).abs() < 0.02);
        let q = charge_q(&sol).unwrap();
        assert!((q - 2.0 / PI).abs() < 0.01 * 2.0 / PI);
        let ratio = gamma_from_solution(&sol) / 100.0;
        assert!((ratio - PI / 4.0).abs() < 0.01);
    }

    #[test]
    fn strong_coupling_bose_limit() {
        let sol = solve_love(Statistics::Bose, 100.0, 200).unwrap();
        assert!(sol.values.iter().all(|&f| f >= 1.0));
        assert!((gamma_from_solution(&sol) / 100.0 - PI).abs() < 0.02 * PI);
        assert!((energy(&sol) - PI * PI / 3.0).abs() < 0.02 * PI * PI / 3.0);
    }

    #[test]
    fn charge_requires_fermi() {
        let sol = solve_love(Statistics::Bose, 2.0, 32).unwrap();
        assert_eq!(charge_q(&sol), Err(Error::WrongStatistics { expected: "fermi" }));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(solve_love(Statistics::Fermi, 0.0, 100).is_err());
        assert!(solve_love(Statistics::Fermi, 1.0, 4).is_err());
        assert!(solve_for_gamma(Statistics::Fermi, -1.0, 100).is_err());
    }

    #[test]
    fn total_energy_adds_binding_term() {
        let sol = solve_love(Statistics::Fermi, 1.0, 64).unwrap();
        let g = gamma_from_solution(&sol);
        assert!((energy_total(&sol) - (energy(&sol) - g * g / 4.0)).abs() < 1e-15);
    }

    #[test]
    fn statistics_parse() {
        assert_eq!("Fermi".parse::<Statistics>().unwrap(), Statistics::Fermi);
        assert_eq!("bose".parse::<Statistics>().unwrap(), Statistics::Bose);
        assert!("anyon".parse::<Statistics>().is_err());
    }
}
