use deltagas::fredholm::{default_nodes, solve_love, Statistics};
use deltagas::hankel::{
    charge_q_via_hankel, g_hat_plus, g_hat_plus_direct, g_plus_zero, g_plus_zero_x_space, half_line_grid,
    kernel_l1_norm, neumann_solve, neumann_with, solve_pair, HankelOperator,
};
use deltagas::quadrature::{Domain, QuadratureGrid};
use deltagas::Error;
use proptest::prelude::*;

// mpmath ray quadrature at 30 digits
const G_PLUS_ZERO: [(f64, f64); 3] = [
    (20.0, 0.713_374_039_156_144_842_1),
    (50.0, 0.856_344_507_130_274_232_15),
    (100.0, 0.965_490_761_787_654_018_36),
];
const G_HAT_PLUS_20_AT_HALF: f64 = 0.242_398_431_395_892_520_38;

fn fredholm_fint(r: f64) -> f64 {
    let kappa = 2.0 / r;
    r * solve_love(Statistics::Fermi, kappa, default_nodes(kappa)).unwrap().m0
}

/// A coarse geometric grid; enough for algebraic identities.
fn coarse_grid(r: f64) -> QuadratureGrid {
    let extent = 1e3 * r;
    let mut breaks = vec![0.0];
    let mut b = 1e-3;
    while b < extent {
        breaks.push(b);
        b *= 4.0;
    }
    breaks.push(extent);
    QuadratureGrid::composite(&breaks, 8, Domain::SemiInfinite { decay: 1.0 / r, y_max: extent }).unwrap()
}

#[test]
fn g_plus_zero_against_oracle() {
    for (r, want) in G_PLUS_ZERO {
        let got = g_plus_zero(r).unwrap();
        assert!((got / want - 1.0).abs() < 1e-13, "r={r}: {got} vs {want}");
    }
}

#[test]
fn g_hat_plus_closed_form_and_direct_quadrature() {
    let point = QuadratureGrid::new(vec![0.5], vec![1.0], Domain::Finite { a: 0.0, b: 1.0 }).unwrap();
    let closed = g_hat_plus(20.0, &point).unwrap().values[0];
    assert!((closed / G_HAT_PLUS_20_AT_HALF - 1.0).abs() < 1e-12, "{closed}");
    let direct = g_hat_plus_direct(20.0, 0.5).unwrap();
    assert!((direct / G_HAT_PLUS_20_AT_HALF - 1.0).abs() < 1e-11, "{direct}");
}

#[test]
fn x_space_integral_matches_closed_form() {
    let r = 20.0;
    let grid = half_line_grid(r).unwrap();
    let g = g_hat_plus(r, &grid).unwrap();
    let x_space = g_plus_zero_x_space(r, &g).unwrap();
    assert!((x_space - g_plus_zero(r).unwrap()).abs() < 1e-12);
}

#[test]
fn neumann_and_direct_solve_against_fredholm() {
    let r = 20.0;
    let grid = half_line_grid(r).unwrap();
    let g = g_hat_plus(r, &grid).unwrap();
    let op = HankelOperator::new(r, &grid).unwrap();
    let fint = fredholm_fint(r);
    let direct = r + 2.0 * op.solve_h0(&g).unwrap();
    assert!((direct - fint).abs() < 1e-10, "{direct} vs {fint}");
    let res = neumann_with(r, 4, &g, Some(&op)).unwrap();
    let mut partial = r;
    let mut last_error = f64::INFINITY;
    for term in &res.per_order {
        partial += 2.0 * term;
        let error = (partial - fint).abs();
        // each order gains roughly a factor of r
        assert!(error < last_error / 10.0, "{error} after {last_error}");
        last_error = error;
    }
    assert!(last_error < 1e-9);
    assert_eq!(res.fhat0, r + 2.0 * res.h0);
}

#[test]
fn charge_from_half_line_route() {
    let q = charge_q_via_hankel(0.1, 3).unwrap();
    let fredholm = solve_love(Statistics::Fermi, 0.1, default_nodes(0.1)).unwrap().m0 / std::f64::consts::PI;
    assert!(((q - fredholm) / fredholm).abs() < 1e-8);
}

#[test]
fn kernel_norm_halves_with_r() {
    let norms: Vec<f64> = [10.0, 20.0, 40.0, 80.0].iter().map(|&r| kernel_l1_norm(r).unwrap()).collect();
    for pair in norms.windows(2) {
        let ratio = pair[1] / pair[0];
        assert!((0.375..=0.625).contains(&ratio), "{norms:?}");
    }
}

#[test]
fn domain_errors() {
    assert!(matches!(neumann_solve(1.0, 2), Err(Error::InvalidArgument(_))));
    assert!(charge_q_via_hankel(1.0, 1).is_err());
    assert!(g_plus_zero(-1.0).is_err());
    assert!(g_hat_plus_direct(20.0, 0.0).is_err());
    let op = HankelOperator::new(10.0, &coarse_grid(10.0)).unwrap();
    let g = g_hat_plus(10.0, &coarse_grid(20.0)).unwrap();
    assert_eq!(op.solve(&g).unwrap_err(), Error::GridMismatch);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn pair_system_matches_reduced_equation(r in 6.0f64..60.0) {
        let grid = coarse_grid(r);
        let pair = solve_pair(r, &grid).unwrap();
        let reduced = HankelOperator::new(r, &grid).unwrap().solve(&g_hat_plus(r, &grid).unwrap()).unwrap();
        for ((p, m), h) in pair.h_plus.values.iter().zip(&pair.h_minus_reflected.values).zip(&reduced.values) {
            prop_assert!((p - h).abs() <= 1e-10);
            prop_assert!((m - h).abs() <= 1e-10);
        }
    }
}
