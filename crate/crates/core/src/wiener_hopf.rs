//! The symbol `σ(ξ) = (1 + e^{-|ξ|})/2`, its explicit Wiener–Hopf factors,
//! the small-ξ expansion of `1/σ₊`, and the real-line kernels
//!
//! ```text
//! k(x)  = -(1/π) PV∫₀^∞ e^{-xy} σ₋(-iy)² tan(y/2) dy
//! s₁(x) = -(1/π) PV∫₀^∞ e^{-xy} σ₋(-iy)  tan(y/2) dy
//! ```
//!
//! `k` is the inverse Fourier transform of `σ₋/σ₊ - 1` and `s₁` that of
//! `1/σ₊ - √2`. Each kernel is available through two independent routes: the
//! principal value along the real axis, and an ordinary integral along the
//! ray `arg t = -π/4`, where the poles of `tan(t/2)` are out of the way. For a
//! real integrand the two half-residue indentations are complex conjugates, so
//! the principal value is the real part of the ray integral.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, laplace_grid_with_breaks, pv_integrate_known, QuadratureGrid};
use crate::special::{log_gamma, ComplexPoint, EULER_GAMMA};

const LN_2PI: f64 = 1.837_877_066_409_345_5;
const ZETA3: f64 = 1.202_056_903_159_594_3;

/// `σ(ξ) = (1 + e^{-|ξ|})/2`.
pub fn symbol(xi: f64) -> f64 {
    0.5 * (1.0 + (-xi.abs()).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HalfPlane {
    Upper,
    Lower,
}

/// A value of σ₊ (upper) or σ₋ (lower) together with where it was taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorValue {
    pub value: ComplexPoint,
    pub half_plane: HalfPlane,
    pub at: ComplexPoint,
}

/// σ₊ on the closed upper half-plane or σ₋ on the closed lower one, inside
/// the strip `|Im ξ| < π`.
///
/// ```text
/// σ₊(ξ) = √π exp{ (ξ/2πi)[log(-iξ) - log 2π - 1]} / Γ(1/2 + ξ/2πi)
/// σ₋(ξ) = √π exp{-(ξ/2πi)[log( iξ) - log 2π - 1]} / Γ(1/2 - ξ/2πi)
/// ```
pub fn factor(half_plane: HalfPlane, xi: ComplexPoint) -> Result<FactorValue> {
    if !xi.re.is_finite() || !xi.im.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite argument {xi}")));
    }
    if xi.im.abs() >= PI {
        return Err(Error::OutsideStrip(format!("|Im ξ| = {} ≥ π", xi.im.abs())));
    }
    let value = match half_plane {
        HalfPlane::Upper => {
            if xi.im < 0.0 {
                return Err(Error::WrongHalfPlane(format!("σ₊ needs Im ξ ≥ 0, got {xi}")));
            }
            // σ₊(ξ) = σ₋(-iw) with w = -iξ, Re w ≥ 0
            sigma_minus_down(Complex64::new(xi.im, -xi.re))
        }
        HalfPlane::Lower => {
            if xi.im > 0.0 {
                return Err(Error::WrongHalfPlane(format!("σ₋ needs Im ξ ≤ 0, got {xi}")));
            }
            sigma_minus_down(Complex64::new(-xi.im, xi.re))
        }
    };
    Ok(FactorValue { value, half_plane, at: xi })
}

/// `σ₋(-it) = √π exp{τ(log t - log 2π - 1)} / Γ(1/2 + τ)` with `τ = t/2π`, for
/// `Re t ≥ 0`. By evenness of σ this is also `σ₊(it)`. Real and positive for
/// real `t > 0`, tending to `1/√2` as `|t| → ∞`.
pub fn sigma_minus_down(t: ComplexPoint) -> ComplexPoint {
    if t.norm() == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let tau = t / (2.0 * PI);
    let log = if tau.norm() >= 20.0 {
        // log Γ(τ+1/2) = τ log τ - τ + log√(2π) + Σ_k B_{2k}(1/2)/(2k(2k-1)τ^{2k-1});
        // the τ log τ terms cancel exactly against the numerator
        let inv = tau.inv();
        let inv2 = inv * inv;
        let series = inv
            * (1.0 / 24.0
                + inv2
                    * (-7.0 / 2880.0
                        + inv2 * (31.0 / 40320.0 + inv2 * (-127.0 / 215040.0 + inv2 * (2555.0 / 3041280.0)))));
        -0.5 * LN_2 + series
    } else {
        let lg = log_gamma(tau + 0.5).expect("Re τ ≥ 0 keeps τ + 1/2 off the poles");
        0.5 * PI.ln() + tau * (t.ln() - LN_2PI - 1.0) - lg
    };
    log.exp()
}

/// `tan z`, stable for large `|Im z|`.
fn tan_stable(z: ComplexPoint) -> ComplexPoint {
    if z.im.abs() < 1.0 {
        return z.tan();
    }
    // tan z = -i(1 - q)/(1 + q), q = e^{-2iz}, |q| < 1 when Im z < 0
    let (w, flip) = if z.im < 0.0 { (z, false) } else { (z.conj(), true) };
    let q = (Complex64::new(0.0, -2.0) * w).exp();
    let v = Complex64::new(0.0, -1.0) * (1.0 - q) / (1.0 + q);
    if flip {
        v.conj()
    } else {
        v
    }
}

/// Coefficients of `1/σ₊(ξ) = Σ_{0≤m≤n} a_{n,m} ξⁿ logᵐ(-iξ)` near 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionCoefficients {
    depth: usize,
    entries: BTreeMap<(usize, usize), ComplexPoint>,
}

impl ExpansionCoefficients {
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `a_{n,m}`, or `None` outside `0 ≤ m ≤ n ≤ depth`.
    pub fn get(&self, n: usize, m: usize) -> Option<ComplexPoint> {
        self.entries.get(&(n, m)).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), ComplexPoint)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    /// The truncated sum at `ξ ≠ 0` with `Im ξ ≥ 0`.
    pub fn evaluate(&self, xi: ComplexPoint) -> ComplexPoint {
        let log = (Complex64::new(0.0, -1.0) * xi).ln();
        self.entries
            .iter()
            .map(|(&(n, m), a)| a * xi.powu(n as u32) * log.powu(m as u32))
            .sum()
    }
}

/// Deepest supported order of [`expansion_coeffs`].
pub const MAX_EXPANSION_DEPTH: usize = 4;

/// `a_{n,m}` for `n ≤ depth ≤ 4`, in closed form.
///
/// On `ξ = it`, `1/σ₊(it) = Γ(1/2+τ)/√π · exp(τ(log 2π + 1) - τ log t)` with
/// `τ = t/2π`. Expanding `log Γ(1/2+τ)` in polygamma values at 1/2 and
/// collecting `tⁿ logᵐ t` gives real `b_{n,m}`, and `a_{n,m} = b_{n,m}/iⁿ`.
pub fn expansion_coeffs(depth: usize) -> Result<ExpansionCoefficients> {
    if depth > MAX_EXPANSION_DEPTH {
        return Err(Error::DepthExceeded(depth));
    }
    let psi = [
        -EULER_GAMMA - 2.0 * LN_2,
        0.5 * PI * PI,
        -14.0 * ZETA3,
        PI.powi(4),
    ];
    // exponent as a polynomial in t and ℓ = log t: x[n][m] is the t^n ℓ^m coefficient
    let n_max = depth;
    let mut exponent = vec![vec![0.0; n_max + 1]; n_max + 1];
    let mut factorial = 1.0;
    for k in 1..=n_max {
        factorial *= k as f64;
        let mut c = psi[k - 1] / factorial / (2.0 * PI).powi(k as i32);
        if k == 1 {
            c += (LN_2PI + 1.0) / (2.0 * PI);
        }
        exponent[k][0] = c;
    }
    if n_max >= 1 {
        exponent[1][1] = -1.0 / (2.0 * PI);
    }
    let multiply = |a: &Vec<Vec<f64>>, b: &Vec<Vec<f64>>| {
        let mut out = vec![vec![0.0; n_max + 1]; n_max + 1];
        for (n1, row1) in a.iter().enumerate() {
            for (m1, c1) in row1.iter().enumerate().filter(|(_, c)| **c != 0.0) {
                for n2 in 0..=(n_max - n1) {
                    for (m2, c2) in b[n2].iter().enumerate() {
                        if m1 + m2 <= n_max {
                            out[n1 + n2][m1 + m2] += c1 * c2;
                        }
                    }
                }
            }
        }
        out
    };
    let mut total = vec![vec![0.0; n_max + 1]; n_max + 1];
    total[0][0] = 1.0;
    let mut power = total.clone();
    for j in 1..=n_max {
        power = multiply(&power, &exponent);
        for n in 0..=n_max {
            for m in 0..=n_max {
                total[n][m] += power[n][m] / (1..=j).product::<usize>() as f64;
            }
        }
    }
    let mut entries = BTreeMap::new();
    for n in 0..=n_max {
        // 1/iⁿ = (-i)ⁿ
        let unit = Complex64::new(0.0, -1.0).powu(n as u32);
        for m in 0..=n {
            entries.insert((n, m), unit * total[n][m]);
        }
    }
    Ok(ExpansionCoefficients { depth, entries })
}

/// Gauss–Legendre nodes on geometric panels `[2^k, 2^{k+1}]` of the ray
/// `t = u e^{-iπ/4}`, with `σ₋(-it)` and `tan(t/2)` tabulated once.
#[derive(Debug)]
pub struct RayRule {
    /// Panel `p` occupies `[2^{p + MIN_EXP}, 2^{p + MIN_EXP + 1}]`.
    t: Vec<ComplexPoint>,
    weights: Vec<ComplexPoint>,
    sigma: Vec<ComplexPoint>,
    tan: Vec<ComplexPoint>,
}

const RAY_MIN_EXP: i32 = -60;
const RAY_MAX_EXP: i32 = 62;
const RAY_PER_PANEL: usize = 24;
/// Laplace integrals with rate `x` are cut to `u ∈ [LO/x, HI/x]` on the ray,
/// where the neglected pieces are below `(LO)²` and `e^{-HI/√2}` respectively.
const RAY_WINDOW_LO: f64 = 1e-8;
const RAY_WINDOW_HI: f64 = 80.0;

impl RayRule {
    fn build() -> Self {
        let reference = gauss_legendre(RAY_PER_PANEL, 0.0, 1.0).expect("fixed valid rule");
        let dir = Complex64::from_polar(1.0, -0.25 * PI);
        let panels = (RAY_MAX_EXP - RAY_MIN_EXP) as usize;
        let mut t = Vec::with_capacity(panels * RAY_PER_PANEL);
        let mut weights = Vec::with_capacity(t.capacity());
        for p in 0..panels {
            let a = 2f64.powi(RAY_MIN_EXP + p as i32);
            for (x, w) in reference.iter() {
                t.push(dir * (a + a * x));
                weights.push(dir * (a * w));
            }
        }
        let sigma = t.iter().map(|&t| sigma_minus_down(t)).collect();
        let tan = t.iter().map(|&t| tan_stable(0.5 * t)).collect();
        Self { t, weights, sigma, tan }
    }

    /// Node range covering `u ∈ [lo, hi]` by whole panels.
    fn range(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let first = (lo.log2().floor() as i32).clamp(RAY_MIN_EXP, RAY_MAX_EXP) - RAY_MIN_EXP;
        let last = (hi.log2().ceil() as i32).clamp(RAY_MIN_EXP, RAY_MAX_EXP) - RAY_MIN_EXP;
        (first as usize * RAY_PER_PANEL)..(last as usize * RAY_PER_PANEL)
    }

    /// `Re ∫ g(t, σ₋(-it), tan(t/2)) dt` along the ray over `u ∈ [lo, hi]`.
    pub fn integrate<G>(&self, lo: f64, hi: f64, g: G) -> f64
    where
        G: Fn(ComplexPoint, ComplexPoint, ComplexPoint) -> ComplexPoint,
    {
        self.range(lo, hi)
            .map(|i| self.weights[i] * g(self.t[i], self.sigma[i], self.tan[i]))
            .sum::<ComplexPoint>()
            .re
    }

    /// The window for a Laplace integral with rate `x`.
    pub fn window(x: f64) -> (f64, f64) {
        (RAY_WINDOW_LO / x, RAY_WINDOW_HI / x)
    }

    /// Smallest and largest ray radii covered.
    pub fn extent() -> (f64, f64) {
        (2f64.powi(RAY_MIN_EXP), 2f64.powi(RAY_MAX_EXP))
    }
}

/// The shared ray rule.
pub fn ray_rule() -> &'static RayRule {
    static RULE: OnceLock<RayRule> = OnceLock::new();
    RULE.get_or_init(RayRule::build)
}

/// Rates whose ray window fits inside the tabulated panels.
pub fn ray_covers(x: f64) -> bool {
    let (lo, hi) = RayRule::extent();
    x >= RAY_WINDOW_HI / hi && x <= RAY_WINDOW_LO / lo
}

fn check_x(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("kernel argument must be positive, got {x}")));
    }
    if !ray_covers(x) {
        return Err(Error::InvalidArgument(format!("kernel argument {x} outside tabulated range")));
    }
    Ok(())
}

/// `k(x)` along the ray. Agrees with [`hankel_kernel_k`] to roughly 1e-13.
pub fn hankel_kernel_k_ray(x: f64) -> Result<f64> {
    check_x(x)?;
    let (lo, hi) = RayRule::window(x);
    Ok(-ray_rule().integrate(lo, hi, |t, s, tan| (-x * t).exp() * s * s * tan) / PI)
}

/// `s₁(x)` along the ray.
pub fn s1_kernel_ray(x: f64) -> Result<f64> {
    check_x(x)?;
    let (lo, hi) = RayRule::window(x);
    Ok(-ray_rule().integrate(lo, hi, |t, s, tan| (-x * t).exp() * s * tan) / PI)
}

/// `σ₋(-iy)` for real `y ≥ 0`.
fn sigma_minus_real(y: f64) -> f64 {
    sigma_minus_down(Complex64::new(y, 0.0)).re
}

const PV_NODES_PER_WINDOW: usize = 96;
// stop summing pole windows once e^{-xy} is below this
const PV_CUTOFF_EXPONENT: f64 = 45.0;

/// PV along the real axis of `e^{-xy} σ₋(-iy)^power tan(y/2)`, one window
/// `[p-π, p+π]` per pole `p = (2j+1)π`. Subtracting the residue term inside a
/// window costs nothing because its PV over a symmetric interval vanishes.
/// The first window carries the `e^{-xy}` boundary layer and gets a Laplace grid.
fn pv_kernel(x: f64, power: i32) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("kernel argument must be positive, got {x}")));
    }
    let f = |y: f64| (-x * y).exp() * sigma_minus_real(y).powi(power) * (0.5 * y).tan();
    let residue = |p: f64| -2.0 * (-x * p).exp() * sigma_minus_real(p).powi(power);
    let first = laplace_grid_with_breaks(x, 256, 2.0 * PI, &[PI])?;
    let mut total = pv_integrate_known(f, &first, &[PI], &[residue(PI)])?;
    let window = QuadratureGrid::composite(
        &(0..=8).map(|i| i as f64 * PI / 4.0).collect::<Vec<_>>(),
        PV_NODES_PER_WINDOW / 8,
        crate::quadrature::Domain::Finite { a: 0.0, b: 2.0 * PI },
    )?;
    let mut j = 1usize;
    loop {
        let p = (2 * j + 1) as f64 * PI;
        if x * (p - PI) > PV_CUTOFF_EXPONENT {
            break;
        }
        let grid = window.mapped(p - PI, p + PI)?;
        // tan(y/2) ~ -2/(y - p)
        total += pv_integrate_known(f, &grid, &[p], &[residue(p)])?;
        j += 1;
    }
    Ok(total)
}

/// `k(x) = -(1/π) PV∫₀^∞ e^{-xy} σ₋(-iy)² tan(y/2) dy`, the kernel of the
/// Hankel operators (as `k(x+y+r)`). `O(x⁻²)` for large x.
pub fn hankel_kernel_k(x: f64) -> Result<f64> {
    Ok(-pv_kernel(x, 2)? / PI)
}

/// `s₁(x) = -(1/π) PV∫₀^∞ e^{-xy} σ₋(-iy) tan(y/2) dy`, the inverse transform
/// of `1/σ₊` with its `√2 δ` part removed. `O(x⁻²)` for large x.
pub fn s1_kernel(x: f64) -> Result<f64> {
    Ok(-pv_kernel(x, 1)? / PI)
}

/// `k_{+/-}(-x) = -(1/π) PV∫₀^∞ e^{-xy} σ₊(iy)² tan(y/2) dy`, the kernel of the
/// partner Hankel operator, from the σ₊ formula on the positive imaginary
/// axis. Equal to [`hankel_kernel_k`] because σ is even.
pub fn hankel_kernel_k_partner(x: f64) -> Result<f64> {
    check_x(x)?;
    let (lo, hi) = RayRule::window(x);
    let g = |t: ComplexPoint, _s: ComplexPoint, tan: ComplexPoint| {
        let s = sigma_plus_up(t);
        (-x * t).exp() * s * s * tan
    };
    Ok(-ray_rule().integrate(lo, hi, g) / PI)
}

/// Which ray integrand a [`kernel_matrix`] tabulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RayKernel {
    /// `k`, from `σ₋(-it)²`.
    K,
    /// The partner kernel `k_{+/-}(-·)`, from `σ₊(it)²`.
    Partner,
    /// `s₁`, from `σ₋(-it)`.
    S1,
    /// `∫_x^∞ k`, from `σ₋(-it)²/t`.
    KTail,
}

/// `M_ij = kernel(a_i + b_j + shift)` for all pairs, as one complex matrix
/// product over the ray nodes: `e^{-(a+b+c)t} = e^{-at} · e^{-(b+c)t}`.
pub fn kernel_matrix(a: &[f64], b: &[f64], shift: f64, kind: RayKernel) -> Result<DMatrix<f64>> {
    if a.is_empty() || b.is_empty() {
        return Ok(DMatrix::zeros(a.len(), b.len()));
    }
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let smallest = min(a) + min(b) + shift;
    let largest = max(a) + max(b) + shift;
    check_x(smallest)?;
    check_x(largest)?;
    let rule = ray_rule();
    let range = rule.range(RayRule::window(largest).0, RayRule::window(smallest).1);
    let nodes = range.len();
    let left = DMatrix::<ComplexPoint>::from_fn(a.len(), nodes, |i, l| {
        (-a[i] * rule.t[range.start + l]).exp()
    });
    let g: Vec<ComplexPoint> = range
        .clone()
        .map(|idx| {
            let factor = match kind {
                RayKernel::K => rule.sigma[idx] * rule.sigma[idx],
                RayKernel::Partner => sigma_plus_up(rule.t[idx]).powu(2),
                RayKernel::S1 => rule.sigma[idx],
                RayKernel::KTail => rule.sigma[idx] * rule.sigma[idx] / rule.t[idx],
            };
            rule.weights[idx] * factor * rule.tan[idx]
        })
        .collect();
    let right = DMatrix::<ComplexPoint>::from_fn(nodes, b.len(), |l, j| {
        (-(b[j] + shift) * rule.t[range.start + l]).exp() * g[l]
    });
    let product = left * right;
    Ok(product.map(|z| -z.re / PI))
}

/// `σ₊(it)` for `Re t ≥ 0`, from the σ₊ formula with `-iξ = t`.
pub fn sigma_plus_up(t: ComplexPoint) -> ComplexPoint {
    if t.norm() == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let xi = Complex64::new(0.0, 1.0) * t;
    let z = xi / Complex64::new(0.0, 2.0 * PI);
    if z.norm() >= 20.0 {
        return sigma_minus_down(t);
    }
    let lg = log_gamma(z + 0.5).expect("Re z ≥ 0");
    (0.5 * PI.ln() + z * ((Complex64::new(0.0, -1.0) * xi).ln() - LN_2PI - 1.0) - lg).exp()
}

/// Limit of σ± at infinity.
pub const SIGMA_AT_INFINITY: f64 = FRAC_1_SQRT_2;
