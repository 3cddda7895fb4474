//! Quadrature rules: Gauss–Legendre on finite intervals, composite rules for
//! Laplace-type integrals on `[0, ∞)`, and Cauchy principal values through
//! interior simple poles.

use crate::error::{Error, Result};

/// Where a [`QuadratureGrid`] lives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Finite { a: f64, b: f64 },
    /// `[0, ∞)` truncated at `y_max`; `decay` is the exponential rate the rule was built for.
    SemiInfinite { decay: f64, y_max: f64 },
}

impl Domain {
    /// The interval actually covered by the nodes.
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Domain::Finite { a, b } => (a, b),
            Domain::SemiInfinite { y_max, .. } => (0.0, y_max),
        }
    }
}

/// Nodes and positive weights of a quadrature rule. Nodes are strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    domain: Domain,
}

impl QuadratureGrid {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>, domain: Domain) -> Result<Self> {
        if nodes.len() != weights.len() || nodes.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "{} nodes but {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("nodes are not strictly increasing".into()));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidArgument("weights must be positive".into()));
        }
        Ok(Self { nodes, weights, domain })
    }

    /// Gauss–Legendre rules of `per_panel` points on each `[breaks[i], breaks[i+1]]`.
    pub fn composite(breaks: &[f64], per_panel: usize, domain: Domain) -> Result<Self> {
        if breaks.len() < 2 || per_panel == 0 {
            return Err(Error::InvalidArgument("composite rule needs a panel".into()));
        }
        let reference = gauss_legendre(per_panel, -1.0, 1.0)?;
        let mut nodes = Vec::with_capacity(per_panel * (breaks.len() - 1));
        let mut weights = Vec::with_capacity(nodes.capacity());
        for pair in breaks.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if !(a < b) {
                return Err(Error::InvalidInterval { a, b });
            }
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            for (x, w) in reference.nodes.iter().zip(&reference.weights) {
                nodes.push(mid + half * x);
                weights.push(half * w);
            }
        }
        Self::new(nodes, weights, domain)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }

    /// Affine image of this grid onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> Result<Self> {
        if !(a < b) {
            return Err(Error::InvalidInterval { a, b });
        }
        let (lo, hi) = self.domain.bounds();
        let scale = (b - a) / (hi - lo);
        Self::new(
            self.nodes.iter().map(|x| a + (x - lo) * scale).collect(),
            self.weights.iter().map(|w| w * scale).collect(),
            Domain::Finite { a, b },
        )
    }
}

/// Legendre polynomial P_n and its derivative at x.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let dp = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// `n`-point Gauss–Legendre rule on `[a, b]`, exact for degree `2n - 1`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<QuadratureGrid> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInterval { a, b });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess for the i-th largest root
        let theta = std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5);
        let mut x = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * theta.cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1e-3) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d.is_finite() { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    QuadratureGrid::new(
        nodes.iter().map(|x| mid + half * x).collect(),
        weights.iter().map(|w| half * w).collect(),
        Domain::Finite { a, b },
    )
}

/// Default truncation of a Laplace-type integral with rate `decay`.
pub fn default_y_max(decay: f64) -> f64 {
    (40.0 / decay).max(3.0 * std::f64::consts::PI + 1.0)
}

/// Panel breakpoints on `[0, y_max]` for integrands `e^{-decay y} g(y)` with
/// `g` varying on unit scale: geometric toward 0, at most unit-ish width
/// where the exponential is alive, widening again where it is negligible.
fn laplace_breaks(decay: f64, y_max: f64, extra: &[f64]) -> Vec<f64> {
    let scale = 1.0 / decay;
    let width = (2.0 * scale).min(0.5);
    let dead = 40.0 * scale;
    let mut breaks = vec![0.0];
    let mut b = (1e-7 * scale).min(1e-7);
    while b < width && b < y_max {
        breaks.push(b);
        b *= 2.0;
    }
    let mut b = *breaks.last().unwrap();
    loop {
        let step = if b < dead { width } else { (0.5 * b).max(width) };
        b += step;
        if b >= y_max {
            break;
        }
        breaks.push(b);
    }
    breaks.push(y_max);
    for &e in extra {
        if e > 0.0 && e < y_max {
            breaks.push(e);
        }
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * b.abs().max(1.0));
    breaks
}

/// Composite rule for `∫_0^∞ e^{-decay·y} g(y) dy`, clustered near 0 and
/// truncated at `y_max`. `n` is the requested total node count; every panel
/// gets at least 8 points.
pub fn laplace_grid(decay: f64, n: usize, y_max: f64) -> Result<QuadratureGrid> {
    laplace_grid_with_breaks(decay, n, y_max, &[])
}

/// [`laplace_grid`] with additional panel breakpoints.
pub fn laplace_grid_with_breaks(
    decay: f64,
    n: usize,
    y_max: f64,
    extra: &[f64],
) -> Result<QuadratureGrid> {
    if !(decay > 0.0) || !(y_max > 0.0) || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "laplace grid needs decay > 0, y_max > 0, n > 0 (got {decay}, {y_max}, {n})"
        )));
    }
    let breaks = laplace_breaks(decay, y_max, extra);
    let panels = breaks.len() - 1;
    let per_panel = n.div_ceil(panels).max(8);
    QuadratureGrid::composite(&breaks, per_panel, Domain::SemiInfinite { decay, y_max })
}

/// Knobs for [`pv_integrate_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvOptions {
    /// Half-width of the neighbourhood owned by each pole. Residues are
    /// probed well inside it and poles must be at least twice it apart.
    pub excision_radius: f64,
}

impl Default for PvOptions {
    fn default() -> Self {
        Self { excision_radius: 0.5 }
    }
}

fn check_poles(grid: &QuadratureGrid, poles: &[f64], radius: f64) -> Result<()> {
    let (a, b) = grid.domain().bounds();
    let mut sorted = poles.to_vec();
    sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
    for &p in &sorted {
        if !(p > a && p < b) {
            return Err(Error::InvalidArgument(format!("pole {p} outside ({a}, {b})")));
        }
        let tol = 1e-13 * p.abs().max(1.0);
        if grid.nodes().iter().any(|x| (x - p).abs() <= tol) {
            return Err(Error::PoleOnNode { pole: p });
        }
    }
    for pair in sorted.windows(2) {
        if pair[1] - pair[0] <= 2.0 * radius {
            return Err(Error::PolesTooClose { first: pair[0], second: pair[1] });
        }
    }
    Ok(())
}

/// Residue estimate `lim (y-p) F(y)` from symmetric samples, Richardson-extrapolated.
fn probe_residue<F: Fn(f64) -> f64>(f: &F, p: f64, radius: f64) -> f64 {
    let h = 2e-3 * radius;
    let sample = |d: f64| 0.5 * d * (f(p + d) - f(p - d));
    let coarse = sample(h);
    let fine = sample(0.5 * h);
    (4.0 * fine - coarse) / 3.0
}

/// Principal value of `∫ F` over the grid's domain with simple poles at `poles`.
pub fn pv_integrate<F: Fn(f64) -> f64>(f: F, grid: &QuadratureGrid, poles: &[f64]) -> Result<f64> {
    pv_integrate_with(f, grid, poles, PvOptions::default())
}

pub fn pv_integrate_with<F: Fn(f64) -> f64>(
    f: F,
    grid: &QuadratureGrid,
    poles: &[f64],
    opts: PvOptions,
) -> Result<f64> {
    check_poles(grid, poles, opts.excision_radius)?;
    let residues: Vec<f64> = poles
        .iter()
        .map(|&p| probe_residue(&f, p, opts.excision_radius))
        .collect();
    Ok(pv_with_residues(&f, grid, poles, &residues))
}

/// Principal value when the residues at the poles are known in closed form.
pub fn pv_integrate_known<F: Fn(f64) -> f64>(
    f: F,
    grid: &QuadratureGrid,
    poles: &[f64],
    residues: &[f64],
) -> Result<f64> {
    if poles.len() != residues.len() {
        return Err(Error::InvalidArgument("one residue per pole".into()));
    }
    check_poles(grid, poles, 0.0)?;
    Ok(pv_with_residues(&f, grid, poles, residues))
}

// F = Σ c_p/(y-p) + R with R regular; PV of c/(y-p) over [a,b] is c·ln((b-p)/(p-a)).
fn pv_with_residues<F: Fn(f64) -> f64>(
    f: &F,
    grid: &QuadratureGrid,
    poles: &[f64],
    residues: &[f64],
) -> f64 {
    let (a, b) = grid.domain().bounds();
    let regular = grid.integrate(|y| {
        let singular: f64 = poles.iter().zip(residues).map(|(p, c)| c / (y - p)).sum();
        f(y) - singular
    });
    let analytic: f64 = poles
        .iter()
        .zip(residues)
        .map(|(p, c)| c * ((b - p) / (p - a)).ln())
        .sum();
    regular + analytic
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn small_gauss_rules() {
        let g1 = gauss_legendre(1, -1.0, 1.0).unwrap();
        assert_eq!(g1.nodes(), &[0.0]);
        assert!((g1.weights()[0] - 2.0).abs() < 1e-15);
        let g2 = gauss_legendre(2, -1.0, 1.0).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert!((g2.nodes()[0] + r).abs() < 1e-15 && (g2.nodes()[1] - r).abs() < 1e-15);
        assert!(g2.weights().iter().all(|w| (w - 1.0).abs() < 1e-15));
    }

    #[test]
    fn gauss_exactness_and_weight_sum() {
        let g = gauss_legendre(20, -1.0, 1.0).unwrap();
        assert!((g.integrate(|x| x.powi(4)) - 0.4).abs() < 1e-14);
        for n in [1, 5, 16, 63, 400, 2000] {
            let g = gauss_legendre(n, 0.5, 3.0).unwrap();
            let sum: f64 = g.weights().iter().sum();
            assert!((sum - 2.5).abs() < 1e-12, "n={n}: {sum}");
            let exact_cos = 3f64.sin() - 0.5f64.sin();
            assert!((g.integrate(f64::cos) - exact_cos).abs() < 1e-12 || n < 16, "n={n}");
            if n > 63 {
                continue;
            }
            let deg = 2 * n - 1;
            let exact = (3f64.powi(deg as i32 + 1) - 0.5f64.powi(deg as i32 + 1)) / (deg as f64 + 1.0);
            let got = g.integrate(|x| x.powi(deg as i32));
            assert!(((got - exact) / exact).abs() < 1e-11 * (n as f64).sqrt(), "n={n}");
        }
    }

    #[test]
    fn gauss_rejects_bad_interval() {
        assert_eq!(gauss_legendre(4, 1.0, 1.0), Err(Error::InvalidInterval { a: 1.0, b: 1.0 }));
        assert!(gauss_legendre(0, 0.0, 1.0).is_err());
    }

    #[test]
    fn gauss_nodes_symmetric() {
        let g = gauss_legendre(257, -1.0, 1.0).unwrap();
        let n = g.len();
        for i in 0..n {
            assert_eq!(g.nodes()[i], -g.nodes()[n - 1 - i]);
        }
    }

    #[test]
    fn laplace_grid_integrals() {
        let g = laplace_grid(1.0, 200, 40.0).unwrap();
        assert!((g.integrate(|y| (-y).exp()) - 1.0).abs() < 1e-10);
        let g2 = laplace_grid(2.0, 200, 20.0).unwrap();
        assert!((g2.integrate(|y| (-2.0 * y).exp() * y) - 0.25).abs() < 1e-10);
        let gamma_52 = 0.75 * PI.sqrt();
        assert!((g.integrate(|y| (-y).exp() * y.powf(1.5)) - gamma_52).abs() < 1e-8);
    }

    #[test]
    fn default_truncation_covers_first_poles() {
        assert!(default_y_max(100.0) > 3.0 * PI);
        assert_eq!(default_y_max(0.5), 80.0);
    }

    #[test]
    fn pv_of_odd_and_centered_integrands() {
        let g = gauss_legendre(64, -1.0, 1.0).unwrap();
        assert!(pv_integrate(|y| 1.0 / y, &g, &[0.0]).unwrap().abs() < 1e-12);
        let g = gauss_legendre(64, 0.0, 4.0).unwrap();
        assert!(pv_integrate(|y| 1.0 / (y - 2.0), &g, &[2.0]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn pv_error_paths() {
        let odd = gauss_legendre(5, -1.0, 1.0).unwrap();
        assert_eq!(pv_integrate(|y| 1.0 / y, &odd, &[0.0]), Err(Error::PoleOnNode { pole: 0.0 }));
        let g = gauss_legendre(64, 0.0, 10.0).unwrap();
        assert!(matches!(
            pv_integrate(|y| 1.0 / ((y - 3.0) * (y - 3.5)), &g, &[3.0, 3.5]),
            Err(Error::PolesTooClose { .. })
        ));
    }

    #[test]
    fn pv_matches_log_formula_off_center() {
        // PV ∫_0^3 e^y/(y-1) dy = e·(ln 2) + ∫_0^3 (e^y - e)/(y-1) dy; check against the
        // same split evaluated with a dense plain rule.
        let g = QuadratureGrid::composite(&[0.0, 0.5, 1.5, 3.0], 32, Domain::Finite { a: 0.0, b: 3.0 })
            .unwrap();
        let pv = pv_integrate(|y| y.exp() / (y - 1.0), &g, &[1.0]).unwrap();
        let fine = gauss_legendre(200, 0.0, 3.0).unwrap();
        let e = 1f64.exp();
        let reference = e * 2f64.ln()
            + fine.integrate(|y| if (y - 1.0).abs() < 1e-12 { e } else { (y.exp() - e) / (y - 1.0) });
        assert!((pv - reference).abs() < 1e-12, "{pv} vs {reference}");
    }
}
