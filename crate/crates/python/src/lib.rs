//! Python bindings for `deltagas`.

use std::collections::BTreeMap;

use deltagas::asymptotics;
use deltagas::fredholm::{self, NystromSolution, Statistics};
use deltagas::hankel::{self, NeumannResult};
use deltagas::wiener_hopf::{self, HalfPlane};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: deltagas::Error) -> PyErr {
    if e.is_usage() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn parse_stat(stat: &str) -> PyResult<Statistics> {
    stat.parse().map_err(to_py)
}

/// Solution of the Lieb-Liniger (bose) or Gaudin (fermi) equation on [-1, 1].
#[pyclass(name = "Solution", frozen, skip_from_py_object)]
struct PySolution(NystromSolution);

#[pymethods]
impl PySolution {
    #[getter]
    fn stat(&self) -> &'static str {
        self.0.stat.name()
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.0.params.kappa
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.params.gamma
    }

    #[getter]
    fn r(&self) -> f64 {
        self.0.params.r
    }

    #[getter]
    fn m0(&self) -> f64 {
        self.0.m0
    }

    #[getter]
    fn m2(&self) -> f64 {
        self.0.m2
    }

    #[getter]
    fn condition(&self) -> f64 {
        self.0.condition
    }

    #[getter]
    fn nodes(&self) -> Vec<f64> {
        self.0.grid.nodes().to_vec()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.0.grid.weights().to_vec()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.0.values.clone()
    }

    /// Disc charge Q = m0/π (fermi only).
    fn charge(&self) -> PyResult<f64> {
        fredholm::charge_q(&self.0).map_err(to_py)
    }

    fn energy(&self) -> f64 {
        fredholm::energy(&self.0)
    }

    fn energy_total(&self) -> f64 {
        fredholm::energy_total(&self.0)
    }

    fn __repr__(&self) -> String {
        format!(
            "Solution(stat={:?}, kappa={}, gamma={}, n={}, m0={})",
            self.0.stat.name(),
            self.0.params.kappa,
            self.0.params.gamma,
            self.0.values.len(),
            self.0.m0
        )
    }
}

/// Truncated Neumann series of the half-line route.
#[pyclass(name = "NeumannResult", frozen, skip_from_py_object)]
struct PyNeumann(NeumannResult);

#[pymethods]
impl PyNeumann {
    #[getter]
    fn r(&self) -> f64 {
        self.0.r
    }

    #[getter]
    fn order(&self) -> usize {
        self.0.order
    }

    #[getter]
    fn h0(&self) -> f64 {
        self.0.h0
    }

    #[getter]
    fn fhat0(&self) -> f64 {
        self.0.fhat0
    }

    #[getter]
    fn per_order(&self) -> Vec<f64> {
        self.0.per_order.clone()
    }

    fn __repr__(&self) -> String {
        format!("NeumannResult(r={}, order={}, fhat0={})", self.0.r, self.0.order, self.0.fhat0)
    }
}

/// Nyström solve at coupling `kappa`; `n` defaults to ceil(16/kappa) clamped to [64, 6000].
#[pyfunction]
#[pyo3(signature = (stat, kappa, n=None))]
fn solve(py: Python<'_>, stat: &str, kappa: f64, n: Option<usize>) -> PyResult<PySolution> {
    let stat = parse_stat(stat)?;
    let n = n.unwrap_or_else(|| fredholm::default_nodes(kappa));
    py.detach(|| fredholm::solve_love(stat, kappa, n)).map(PySolution).map_err(to_py)
}

/// Solve for the κ that produces the target γ.
#[pyfunction]
#[pyo3(signature = (stat, gamma, n=256))]
fn solve_for_gamma(py: Python<'_>, stat: &str, gamma: f64, n: usize) -> PyResult<PySolution> {
    let stat = parse_stat(stat)?;
    py.detach(|| fredholm::solve_for_gamma(stat, gamma, n)).map(PySolution).map_err(to_py)
}

/// σ₊ (`"upper"`) or σ₋ (`"lower"`) at a complex point.
#[pyfunction]
fn factor(half_plane: &str, xi: Complex64) -> PyResult<Complex64> {
    let half_plane = match half_plane {
        "upper" | "+" => HalfPlane::Upper,
        "lower" | "-" => HalfPlane::Lower,
        other => return Err(PyValueError::new_err(format!("unknown half-plane {other:?}"))),
    };
    wiener_hopf::factor(half_plane, xi).map(|v| v.value).map_err(to_py)
}

#[pyfunction]
fn symbol(xi: f64) -> f64 {
    wiener_hopf::symbol(xi)
}

/// Small-ξ coefficients a[n, m] of 1/σ₊, keyed by (n, m).
#[pyfunction]
fn expansion_coeffs(depth: usize) -> PyResult<BTreeMap<(usize, usize), Complex64>> {
    Ok(wiener_hopf::expansion_coeffs(depth).map_err(to_py)?.iter().collect())
}

#[pyfunction]
fn kernel_k(x: f64) -> PyResult<f64> {
    wiener_hopf::hankel_kernel_k(x).map_err(to_py)
}

#[pyfunction]
fn kernel_s1(x: f64) -> PyResult<f64> {
    wiener_hopf::s1_kernel(x).map_err(to_py)
}

#[pyfunction]
fn g_plus_zero(r: f64) -> PyResult<f64> {
    hankel::g_plus_zero(r).map_err(to_py)
}

#[pyfunction]
fn neumann_solve(py: Python<'_>, r: f64, order: usize) -> PyResult<PyNeumann> {
    py.detach(|| hankel::neumann_solve(r, order)).map(PyNeumann).map_err(to_py)
}

#[pyfunction]
fn charge_via_hankel(py: Python<'_>, kappa: f64, order: usize) -> PyResult<f64> {
    py.detach(|| hankel::charge_q_via_hankel(kappa, order)).map_err(to_py)
}

#[pyfunction]
fn q_series(kappa: f64) -> f64 {
    asymptotics::q_series(kappa)
}

#[pyfunction]
fn ef_series(gamma: f64) -> f64 {
    asymptotics::ef_series(gamma)
}

#[pyfunction]
fn eb_series(gamma: f64) -> f64 {
    asymptotics::eb_series(gamma)
}

#[pyfunction]
fn fint_series(r: f64) -> f64 {
    asymptotics::fint_series(r)
}

/// Log-log slope of |residuals| against xs: (slope, stderr, intercept).
#[pyfunction]
fn fit_order(xs: Vec<f64>, residuals: Vec<f64>) -> PyResult<(f64, f64, f64)> {
    let fit = asymptotics::fit_order(&xs, &residuals).map_err(to_py)?;
    Ok((fit.slope, fit.stderr, fit.intercept))
}

#[pymodule]
fn deltagas_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySolution>()?;
    m.add_class::<PyNeumann>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(solve_for_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(factor, m)?)?;
    m.add_function(wrap_pyfunction!(symbol, m)?)?;
    m.add_function(wrap_pyfunction!(expansion_coeffs, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_k, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_s1, m)?)?;
    m.add_function(wrap_pyfunction!(g_plus_zero, m)?)?;
    m.add_function(wrap_pyfunction!(neumann_solve, m)?)?;
    m.add_function(wrap_pyfunction!(charge_via_hankel, m)?)?;
    m.add_function(wrap_pyfunction!(q_series, m)?)?;
    m.add_function(wrap_pyfunction!(ef_series, m)?)?;
    m.add_function(wrap_pyfunction!(eb_series, m)?)?;
    m.add_function(wrap_pyfunction!(fint_series, m)?)?;
    m.add_function(wrap_pyfunction!(fit_order, m)?)?;
    Ok(())
}
