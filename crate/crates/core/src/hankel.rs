//! The half-line route for the rescaled Gaudin equation on `[-r/2, r/2]`.
//!
//! Writing `σ f̂ = ĝ + e^{irξ/2} σ₊ h⁺ + e^{-irξ/2} σ₋ h⁻`, the unknowns `h±`
//! satisfy `h⁻ + V h⁺ = G⁻`, `h⁺ + U h⁻ = G⁺`. In x-space `U` and `V` are
//! Hankel operators with kernels `k(x+y+r)`, of norm `O(1/r)`, so the Neumann
//! series converges for large `r`. Because σ is even, `ĥ⁻(-x) = ĥ⁺(x)` and the
//! pair collapses to `(I + K) ĥ⁺ = ĝ⁺`; the pair is kept as [`solve_pair`] to
//! check that reduction.
//!
//! Only `h±(0) = ∫ ĥ±` is extracted: `f̂(0) = r + 2 h⁺(0)` and `Q = (κ/2π) f̂(0)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{Domain, QuadratureGrid};
use crate::special::expm1;
use crate::wiener_hopf::{
    kernel_matrix, ray_rule, s1_kernel_ray, sigma_plus_up, RayKernel, RayRule,
};

/// The half-line grid reaches `HALF_LINE_EXTENT · max(r, 1)`.
pub const HALF_LINE_EXTENT: f64 = 1e4;
/// First breakpoint of the geometric panels.
pub const HALF_LINE_START: f64 = 1e-6;
/// Gauss–Legendre points per panel.
pub const HALF_LINE_PER_PANEL: usize = 16;
/// Smallest `r` for which the Neumann series is attempted.
pub const MIN_R: f64 = 5.0;

/// Samples of a function on `[0, ∞)` on a truncated [`QuadratureGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct HalfLineFunction {
    pub grid: QuadratureGrid,
    pub values: Vec<f64>,
}

impl HalfLineFunction {
    pub fn new(grid: QuadratureGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite half-line values".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: QuadratureGrid) -> Self {
        let values = vec![0.0; grid.len()];
        Self { grid, values }
    }

    /// `∫ u` over the grid.
    pub fn integral(&self) -> f64 {
        self.grid.weights().iter().zip(&self.values).map(|(w, v)| w * v).sum()
    }

    /// `∫ |u|` over the grid.
    pub fn l1_norm(&self) -> f64 {
        self.grid.weights().iter().zip(&self.values).map(|(w, v)| w * v.abs()).sum()
    }
}

/// Nodes on `[0, X]`: one panel `[0, 1e-6]`, then panels doubling in width.
pub fn half_line_grid(r: f64) -> Result<QuadratureGrid> {
    check_r(r, 0.0)?;
    let extent = HALF_LINE_EXTENT * r.max(1.0);
    let mut breaks = vec![0.0];
    let mut b = HALF_LINE_START;
    while b < extent {
        breaks.push(b);
        b *= 2.0;
    }
    breaks.push(extent);
    QuadratureGrid::composite(
        &breaks,
        HALF_LINE_PER_PANEL,
        Domain::SemiInfinite { decay: 1.0 / r, y_max: extent },
    )
}

fn check_r(r: f64, min: f64) -> Result<()> {
    if !(r > min) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("r must exceed {min}, got {r}")));
    }
    Ok(())
}

fn same_grid(a: &QuadratureGrid, b: &QuadratureGrid) -> Result<()> {
    if a.nodes() != b.nodes() || a.weights() != b.weights() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// `ĝ⁺(x) = -∫_x^{x+r} s₁` in closed form along the ray:
/// `(1/π) Re∫ (e^{-xt} - e^{-(x+r)t})/t · σ₋(-it) tan(t/2) dt`.
fn g_hat_plus_at(r: f64, x: f64, partner: bool) -> f64 {
    // the integrand tends to r/2 as t → 0, so start at the bottom of the rule
    let lo = RayRule::extent().0;
    let hi = if x > 0.0 { RayRule::window(x).1 } else { RayRule::extent().1 };
    ray_rule().integrate(lo, hi, |t, s, tan| {
        let s = if partner { sigma_plus_up(t) } else { s };
        -(-x * t).exp() * expm1(-r * t) / t * s * tan
    }) / PI
}

/// The inverse transform of `G⁺` on the grid nodes.
pub fn g_hat_plus(r: f64, grid: &QuadratureGrid) -> Result<HalfLineFunction> {
    check_r(r, 0.0)?;
    let values = grid.nodes().iter().map(|&x| g_hat_plus_at(r, x, false)).collect();
    HalfLineFunction::new(grid.clone(), values)
}

/// `ĝ⁺(x)` by quadrature of [`s1_kernel_ray`] over `[x, x+r]`; an
/// independent check on the closed form used by [`g_hat_plus`].
pub fn g_hat_plus_direct(r: f64, x: f64) -> Result<f64> {
    check_r(r, 0.0)?;
    if !(x > 0.0) {
        return Err(Error::InvalidArgument(format!("x must be positive, got {x}")));
    }
    let mut breaks = vec![x];
    let mut b = 2.0 * x;
    while b < x + r {
        breaks.push(b);
        b *= 2.0;
    }
    breaks.push(x + r);
    let grid = QuadratureGrid::composite(&breaks, 24, Domain::Finite { a: x, b: x + r })?;
    let mut total = 0.0;
    for (y, w) in grid.iter() {
        total += w * s1_kernel_ray(y)?;
    }
    Ok(-total)
}

/// `G⁺(0) = ∫₀^∞ ĝ⁺ = (1/π) Re∫ (1 - e^{-rt})/t² · σ₋(-it) tan(t/2) dt`.
pub fn g_plus_zero(r: f64) -> Result<f64> {
    check_r(r, 0.0)?;
    let (lo, hi) = RayRule::extent();
    Ok(ray_rule().integrate(lo, hi, |t, s, tan| -expm1(-r * t) / (t * t) * s * tan) / PI)
}

/// `∫_X^∞ ĝ⁺`, the part of `G⁺(0)` beyond a truncated grid.
pub fn g_hat_plus_tail(r: f64, extent: f64) -> Result<f64> {
    check_r(r, 0.0)?;
    check_r(extent, 0.0)?;
    let lo = RayRule::extent().0;
    let hi = RayRule::window(extent).1;
    Ok(ray_rule().integrate(lo, hi, |t, s, tan| {
        -(-extent * t).exp() * expm1(-r * t) / (t * t) * s * tan
    }) / PI)
}

/// `∫₀^∞ ĝ⁺` as a grid integral plus the exact tail beyond the grid.
pub fn g_plus_zero_x_space(r: f64, g: &HalfLineFunction) -> Result<f64> {
    let (_, extent) = g.grid.domain().bounds();
    Ok(g.integral() + g_hat_plus_tail(r, extent)?)
}

/// The discretized Hankel operator `(Ku)(x) = ∫₀^∞ k(x+y+r) u(y) dy`.
#[derive(Debug, Clone)]
pub struct HankelOperator {
    r: f64,
    grid: QuadratureGrid,
    // kernel values with the quadrature weight of the column folded in
    matrix: DMatrix<f64>,
    // w_y ∫_X^∞ k(x+y+r) dx: the image's mass beyond the grid end X
    tail: DVector<f64>,
}

impl HankelOperator {
    pub fn new(r: f64, grid: &QuadratureGrid) -> Result<Self> {
        Self::with_kernel(r, grid, RayKernel::K)
    }

    /// The partner operator, built from `σ₊(it)²`.
    pub fn partner(r: f64, grid: &QuadratureGrid) -> Result<Self> {
        Self::with_kernel(r, grid, RayKernel::Partner)
    }

    fn with_kernel(r: f64, grid: &QuadratureGrid, kind: RayKernel) -> Result<Self> {
        check_r(r, 0.0)?;
        let x = grid.nodes();
        let mut matrix = kernel_matrix(x, x, r, kind)?;
        for (j, w) in grid.weights().iter().enumerate() {
            matrix.column_mut(j).scale_mut(*w);
        }
        let (_, extent) = grid.domain().bounds();
        let tail = kernel_matrix(&[extent], x, r, RayKernel::KTail)?;
        let tail = DVector::from_iterator(
            x.len(),
            tail.iter().zip(grid.weights()).map(|(k, w)| k * w),
        );
        Ok(Self { r, grid: grid.clone(), matrix, tail })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn apply(&self, input: &HalfLineFunction) -> Result<HalfLineFunction> {
        same_grid(&self.grid, &input.grid)?;
        let out = &self.matrix * DVector::from_column_slice(&input.values);
        HalfLineFunction::new(self.grid.clone(), out.as_slice().to_vec())
    }

    /// `∫₀^∞ K u`, including the part beyond the grid.
    pub fn image_integral(&self, input: &HalfLineFunction) -> Result<f64> {
        Ok(self.apply(input)?.integral() + self.tail_integral(input)?)
    }

    fn tail_integral(&self, input: &HalfLineFunction) -> Result<f64> {
        same_grid(&self.grid, &input.grid)?;
        Ok(self.tail.iter().zip(&input.values).map(|(t, u)| t * u).sum())
    }

    /// `h⁺(0) = ∫₀^∞ ĥ` for the direct solution of `(I + K) ĥ = ĝ⁺`.
    pub fn solve_h0(&self, g: &HalfLineFunction) -> Result<f64> {
        let h = self.solve(g)?;
        let (_, extent) = self.grid.domain().bounds();
        // beyond X, ĥ = ĝ - Kĥ
        let beyond = g_hat_plus_tail(self.r, extent)? - self.tail_integral(&h)?;
        Ok(h.integral() + beyond)
    }

    /// Solves `(I + K) h = g` directly.
    pub fn solve(&self, g: &HalfLineFunction) -> Result<HalfLineFunction> {
        same_grid(&self.grid, &g.grid)?;
        let n = self.grid.len();
        let system = DMatrix::identity(n, n) + &self.matrix;
        let h = system
            .lu()
            .solve(&DVector::from_column_slice(&g.values))
            .ok_or(Error::SingularSystem { condition: f64::INFINITY })?;
        HalfLineFunction::new(self.grid.clone(), h.as_slice().to_vec())
    }
}

/// `K u` on `u`'s grid; builds the operator each call.
pub fn apply_hankel(r: f64, input: &HalfLineFunction) -> Result<HalfLineFunction> {
    HankelOperator::new(r, &input.grid)?.apply(input)
}

/// Truncated Neumann series for `h⁺(0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeumannResult {
    pub r: f64,
    pub order: usize,
    /// `h⁺(0) = ∫ ĥ⁺`
    pub h0: f64,
    /// `f̂(0) = ∫_{-r/2}^{r/2} f = r + 2 h0`
    pub fhat0: f64,
    /// Signed contribution `(-1)^j ∫ Kʲ ĝ⁺` of each term, `j < order`.
    pub per_order: Vec<f64>,
}

/// `ĥ⁺ ≈ Σ_{j<order} (-1)^j Kʲ ĝ⁺` on [`half_line_grid`]`(r)`.
pub fn neumann_solve(r: f64, order: usize) -> Result<NeumannResult> {
    check_r(r, MIN_R - f64::EPSILON)?;
    let grid = half_line_grid(r)?;
    let g = g_hat_plus(r, &grid)?;
    let op = if order > 1 { Some(HankelOperator::new(r, &grid)?) } else { None };
    neumann_with(r, order, &g, op.as_ref())
}

/// [`neumann_solve`] with a precomputed `ĝ⁺` and operator (needed when `order > 1`).
pub fn neumann_with(
    r: f64,
    order: usize,
    g: &HalfLineFunction,
    op: Option<&HankelOperator>,
) -> Result<NeumannResult> {
    let mut per_order = Vec::with_capacity(order);
    let mut term = g.clone();
    for j in 0..order {
        let contribution = if j == 0 {
            // the grid integral of ĝ⁺ misses a tail of relative size 1/X
            g_plus_zero(r)?
        } else {
            let op = op.ok_or_else(|| Error::InvalidArgument("order > 1 needs the operator".into()))?;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let integral = op.image_integral(&term)?;
            term = op.apply(&term)?;
            sign * integral
        };
        if let Some(prev) = per_order.last() {
            let prev: f64 = *prev;
            if contribution.abs() >= prev.abs() {
                return Err(Error::ContractionFailure { order: j, magnitude: contribution.abs() });
            }
        }
        per_order.push(contribution);
    }
    let h0: f64 = per_order.iter().sum();
    Ok(NeumannResult { r, order, h0, fhat0: r + 2.0 * h0, per_order })
}

/// `Q = (κ/2π) f̂(0)` from the Neumann series at `r = 2/κ`.
pub fn charge_q_via_hankel(kappa: f64, order: usize) -> Result<f64> {
    if !(kappa > 0.0) || kappa > 2.0 / MIN_R {
        return Err(Error::InvalidArgument(format!("kappa must lie in (0, {}], got {kappa}", 2.0 / MIN_R)));
    }
    let res = neumann_solve(2.0 / kappa, order)?;
    Ok(kappa / (2.0 * PI) * res.fhat0)
}

/// Solution of the unreduced pair, with `ĥ⁻` reflected onto `[0, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSolution {
    pub h_plus: HalfLineFunction,
    /// `x ↦ ĥ⁻(-x)`
    pub h_minus_reflected: HalfLineFunction,
}

/// Solves `h⁺ + U h⁻ = G⁺`, `h⁻ + V h⁺ = G⁻` as one `2n × 2n` system. `U`
/// uses `k` from σ₋, `V` the partner kernel from σ₊, and `ĝ⁻` its own closed
/// form with σ₊ in place of σ₋.
pub fn solve_pair(r: f64, grid: &QuadratureGrid) -> Result<PairSolution> {
    check_r(r, 0.0)?;
    let n = grid.len();
    let u = HankelOperator::new(r, grid)?;
    let v = HankelOperator::partner(r, grid)?;
    let g_plus = g_hat_plus(r, grid)?;
    let g_minus: Vec<f64> = grid.nodes().iter().map(|&x| g_hat_plus_at(r, x, true)).collect();
    let mut system = DMatrix::<f64>::identity(2 * n, 2 * n);
    system.view_mut((0, n), (n, n)).copy_from(&u.matrix);
    system.view_mut((n, 0), (n, n)).copy_from(&v.matrix);
    let rhs = DVector::from_iterator(2 * n, g_plus.values.iter().chain(&g_minus).copied());
    let sol = system
        .lu()
        .solve(&rhs)
        .ok_or(Error::SingularSystem { condition: f64::INFINITY })?;
    Ok(PairSolution {
        h_plus: HalfLineFunction::new(grid.clone(), sol.rows(0, n).iter().copied().collect())?,
        h_minus_reflected: HalfLineFunction::new(grid.clone(), sol.rows(n, n).iter().copied().collect())?,
    })
}

/// `∫ |k(x + r)| dx` over `[0, ∞)`, the norm bound of the Hankel operators.
pub fn kernel_l1_norm(r: f64) -> Result<f64> {
    check_r(r, 0.0)?;
    let grid = half_line_grid(r)?;
    let values = kernel_matrix(grid.nodes(), &[0.0], r, RayKernel::K)?;
    let (_, extent) = grid.domain().bounds();
    // k(x) ~ c/x² beyond the grid
    let last = values[(grid.len() - 1, 0)];
    let x_last = grid.nodes()[grid.len() - 1] + r;
    let tail = last.abs() * x_last * x_last / (extent + r);
    Ok(grid.iter().zip(values.iter()).map(|((_, w), k)| w * k.abs()).sum::<f64>() + tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape() {
        let g = half_line_grid(20.0).unwrap();
        assert_eq!(g.domain().bounds(), (0.0, 2e5));
        assert_eq!(g.len() % HALF_LINE_PER_PANEL, 0);
        assert!(g.nodes()[0] > 0.0 && g.nodes()[0] < 1e-6);
    }

    #[test]
    fn order_zero_is_bare_interval() {
        let res = neumann_solve(20.0, 0).unwrap();
        assert_eq!(res.fhat0, 20.0);
        assert!(res.per_order.is_empty());
        let q = charge_q_via_hankel(0.1, 0).unwrap();
        assert!((q - 1.0 / PI).abs() < 1e-16);
    }

    #[test]
    fn zero_input_maps_to_zero() {
        let grid = half_line_grid(10.0).unwrap();
        let op = HankelOperator::new(10.0, &grid).unwrap();
        let out = op.apply(&HalfLineFunction::zeros(grid)).unwrap();
        assert!(out.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let op = HankelOperator::new(10.0, &half_line_grid(10.0).unwrap()).unwrap();
        let other = HalfLineFunction::zeros(half_line_grid(20.0).unwrap());
        assert_eq!(op.apply(&other).unwrap_err(), Error::GridMismatch);
    }

    #[test]
    fn point_mass_picks_out_kernel_slice() {
        let grid = half_line_grid(10.0).unwrap();
        let op = HankelOperator::new(10.0, &grid).unwrap();
        let j = 200;
        let mut values = vec![0.0; grid.len()];
        values[j] = 1.0;
        let out = op.apply(&HalfLineFunction::new(grid.clone(), values).unwrap()).unwrap();
        let y = grid.nodes()[j];
        let w = grid.weights()[j];
        for i in [0, 57, 300] {
            let x = grid.nodes()[i];
            let expected = w * crate::wiener_hopf::hankel_kernel_k_ray(x + y + 10.0).unwrap();
            assert!((out.values[i] - expected).abs() < 1e-13 * expected.abs());
        }
    }

    #[test]
    fn rejects_small_r() {
        assert!(neumann_solve(2.0, 1).is_err());
        assert!(charge_q_via_hankel(0.5, 1).is_err());
    }
}
