//! Command-line front end: argument types, report tables and [`run`].
//!
//! Every float is written with 17 significant digits, so CSV and JSON output
//! parse back to the exact values computed.

use std::f64::consts::PI;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::asymptotics::{fint_series, fit_order, gplus_coeffs, q_series, OrderFit};
use crate::error::{Error, Result};
use crate::fredholm::{
    charge_q, default_nodes, energy, energy_total, solve_for_gamma, solve_love, NystromSolution,
    Statistics,
};
use crate::hankel::{g_hat_plus, g_plus_zero_x_space, half_line_grid, neumann_with, HankelOperator, MIN_R};
use crate::wiener_hopf::{factor, hankel_kernel_k, s1_kernel, symbol, HalfPlane};

#[derive(Debug, Clone, Parser, PartialEq)]
#[command(name = "deltagas", version, about = "Ground states of the delta-function Bose and Fermi gases")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Json, global = true)]
    pub output: OutputFormat,
    /// Write the report here instead of stdout.
    #[arg(long = "out", global = true)]
    pub out_path: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Subcommand, PartialEq)]
pub enum Command {
    /// Solve one integral equation and report moments, Q and energies.
    Solve(SolveArgs),
    /// Solve over a log-spaced range of κ, γ or r.
    Sweep(SweepArgs),
    /// Residual tables against the weak-coupling series, with fitted orders.
    Verify(VerifyArgs),
    /// σ, σ₊, σ₋ and the factorization residual on a real ξ grid.
    Factor(FactorArgs),
    /// Tabulate k and s₁.
    Kernel(KernelArgs),
    /// Neumann-series terms of the half-line route.
    Hankel(HankelArgs),
}

fn parse_stat(s: &str) -> std::result::Result<Statistics, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Clone, Copy, Args, PartialEq)]
#[group(required = true, multiple = false)]
pub struct Coupling {
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Rescaled interval length, κ = 2/r.
    #[arg(long)]
    pub r: Option<f64>,
}

#[derive(Debug, Clone, Args, PartialEq)]
pub struct SolveArgs {
    #[arg(long, value_parser = parse_stat)]
    pub stat: Statistics,
    #[command(flatten)]
    pub coupling: Coupling,
    /// Quadrature nodes (default ⌈16/κ⌉ clamped to [64, 6000]).
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    Kappa,
    Gamma,
    R,
}

#[derive(Debug, Clone, Args, PartialEq)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_stat)]
    pub stat: Statistics,
    #[arg(long, value_enum)]
    pub param: SweepParam,
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    #[arg(long, default_value_t = 8)]
    pub points: usize,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Charge,
    Energy,
    Fint,
    Gplus,
    Hankel,
    All,
}

#[derive(Debug, Clone, Args, PartialEq)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
}

#[derive(Debug, Clone, Args, PartialEq)]
pub struct FactorArgs {
    /// `start:stop:step`
    #[arg(long, default_value = "-10:10:0.5", allow_hyphen_values = true)]
    pub xi_grid: String,
}

#[derive(Debug, Clone, Args, PartialEq)]
pub struct KernelArgs {
    /// `start:stop:step`
    #[arg(long, default_value = "1:50:1")]
    pub x_grid: String,
}

#[derive(Debug, Clone, Args, PartialEq)]
pub struct HankelArgs {
    #[arg(long, required_unless_present = "r", conflicts_with = "r")]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long, default_value_t = 3)]
    pub order: usize,
}

/// Exit status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    NumericalFailure,
    UsageError,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::NumericalFailure => 1,
            Outcome::UsageError => 2,
        }
    }

    fn of_error(e: &Error) -> Self {
        if e.is_usage() {
            Outcome::UsageError
        } else {
            Outcome::NumericalFailure
        }
    }
}

/// Floats as `d.dddddddddddddddde±x`.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        String::new()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => serde_json::Number::from_f64(*v).map(Value::Number).unwrap_or(Value::Null),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Missing => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Table {
    headers: &'static [&'static str],
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(headers: &'static [&'static str]) -> Self {
        Self { headers, rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    fn write_csv(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(w, "{}", self.headers.join(","))?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    fn json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let mut obj = Map::new();
                    for (h, c) in self.headers.iter().zip(row) {
                        obj.insert((*h).to_string(), c.json());
                    }
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// serde_json formatter that writes floats with 17 significant digits.
struct SigDigits;

impl serde_json::ser::Formatter for SigDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_float(value).as_bytes())
    }
}

fn write_json(w: &mut dyn Write, value: &Value) -> io::Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(&mut *w, SigDigits);
    serde::Serialize::serialize(value, &mut ser).map_err(io::Error::other)?;
    writeln!(w)
}

pub const SOLVE_COLUMNS: &[&str] =
    &["stat", "kappa", "gamma", "r", "n", "m0", "m2", "Q", "epsilon", "epsilon_total"];
pub const VERIFY_COLUMNS: &[&str] = &["quantity", "x", "numeric", "series", "residual"];
pub const FACTOR_COLUMNS: &[&str] =
    &["xi", "sigma", "sigma_plus_re", "sigma_plus_im", "sigma_minus_re", "sigma_minus_im", "product_residual"];
pub const KERNEL_COLUMNS: &[&str] = &["x", "k", "x2_k", "s1", "x2_s1"];
pub const HANKEL_COLUMNS: &[&str] = &["r", "order", "term", "h0", "fhat0", "Q"];

fn solve_row(sol: &NystromSolution) -> Vec<Cell> {
    let p = sol.params;
    vec![
        Cell::Text(sol.stat.name().to_string()),
        Cell::Num(p.kappa),
        Cell::Num(p.gamma),
        Cell::Num(p.r),
        Cell::Int(sol.grid.len() as i64),
        Cell::Num(sol.m0),
        Cell::Num(sol.m2),
        charge_q(sol).map(Cell::Num).unwrap_or(Cell::Missing),
        Cell::Num(energy(sol)),
        Cell::Num(energy_total(sol)),
    ]
}

fn solve_one(stat: Statistics, coupling: Coupling, n: Option<usize>) -> Result<NystromSolution> {
    match (coupling.kappa, coupling.gamma, coupling.r) {
        (Some(kappa), None, None) => solve_love(stat, kappa, n.unwrap_or_else(|| default_nodes(kappa))),
        (None, None, Some(r)) => {
            let kappa = 2.0 / r;
            solve_love(stat, kappa, n.unwrap_or_else(|| default_nodes(kappa)))
        }
        (None, Some(gamma), None) => {
            // the node count is picked from the weak-coupling estimate of κ
            let kappa = match stat {
                Statistics::Fermi => 2.0 * gamma / PI,
                Statistics::Bose => (gamma / PI).max(2.0 * gamma.sqrt() / PI),
            };
            solve_for_gamma(stat, gamma, n.unwrap_or_else(|| default_nodes(0.9 * kappa)))
        }
        _ => Err(Error::InvalidArgument("give exactly one of --kappa, --gamma, --r".into())),
    }
}

/// Log-spaced values from `from` to `to` inclusive.
pub fn log_space(from: f64, to: f64, points: usize) -> Result<Vec<f64>> {
    if !(from > 0.0 && to > 0.0) || points == 0 {
        return Err(Error::InvalidArgument("log sweep needs positive bounds and points ≥ 1".into()));
    }
    if points == 1 {
        return Ok(vec![from]);
    }
    let (a, b) = (from.ln(), to.ln());
    Ok((0..points).map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp()).collect())
}

/// `start:stop:step` with a positive step.
pub fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::InvalidArgument(format!("expected start:stop:step, got {spec:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + step * i as f64).collect())
}

/// Acceptance window of a verification suite.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub suite: &'static str,
    table_rows: Vec<Vec<Cell>>,
    pub fit: OrderFit,
    pub pass: bool,
}

impl Report {
    fn to_json(&self) -> Value {
        let table = Table { headers: VERIFY_COLUMNS, rows: self.table_rows.clone() };
        let mut fit = Map::new();
        fit.insert("slope".into(), Cell::Num(self.fit.slope).json());
        fit.insert("stderr".into(), Cell::Num(self.fit.stderr).json());
        let mut obj = Map::new();
        obj.insert("suite".into(), Value::from(self.suite));
        obj.insert("rows".into(), table.json_rows());
        obj.insert("fit".into(), Value::Object(fit));
        obj.insert("pass".into(), Value::from(self.pass));
        Value::Object(obj)
    }

    fn write_csv(&self, w: &mut dyn Write) -> io::Result<()> {
        let table = Table { headers: VERIFY_COLUMNS, rows: self.table_rows.clone() };
        table.write_csv(w)?;
        writeln!(w, "fit_order,{},{}", format_float(self.fit.slope), format_float(self.fit.stderr))
    }

    /// `(quantity, x, numeric, series, residual)` rows.
    pub fn rows(&self) -> Vec<(String, f64, f64, f64, f64)> {
        self.table_rows
            .iter()
            .map(|r| {
                let num = |c: &Cell| if let Cell::Num(v) = c { *v } else { f64::NAN };
                (r[0].csv(), num(&r[1]), num(&r[2]), num(&r[3]), num(&r[4]))
            })
            .collect()
    }
}

fn verify_row(quantity: &str, x: f64, numeric: f64, series: f64) -> Vec<Cell> {
    vec![
        Cell::Text(quantity.to_string()),
        Cell::Num(x),
        Cell::Num(numeric),
        Cell::Num(series),
        Cell::Num(numeric - series),
    ]
}

/// Fredholm `Q(κ)` against the three-term charge series.
pub fn verify_charge() -> Result<Report> {
    let kappas = [0.1, 0.05, 0.02, 0.01];
    let qs: Vec<f64> = kappas
        .par_iter()
        .map(|&k| solve_love(Statistics::Fermi, k, default_nodes(k)).and_then(|s| charge_q(&s)))
        .collect::<Result<_>>()?;
    let rows: Vec<_> = kappas.iter().zip(&qs).map(|(&k, &q)| verify_row("Q", k, q, q_series(k))).collect();
    let residuals: Vec<f64> = kappas.iter().zip(&qs).map(|(&k, &q)| q - q_series(k)).collect();
    let fit = fit_order(&kappas, &residuals)?;
    let pass = fit.slope >= 1.6 && residuals[3].abs() < 5e-5;
    Ok(Report { suite: "charge", table_rows: rows, fit, pass })
}

/// `ε_F(γ)` against `π²/12 - γ/2`, plus the γ → 0 extrapolation of the
/// numerical values by a cubic through the four points.
pub fn verify_energy() -> Result<Report> {
    let gammas = [0.2, 0.1, 0.05, 0.02];
    let eps: Vec<f64> = gammas
        .par_iter()
        .map(|&g| {
            solve_one(Statistics::Fermi, Coupling { kappa: None, gamma: Some(g), r: None }, None)
                .map(|s| energy(&s))
        })
        .collect::<Result<_>>()?;
    let series = |g: f64| crate::asymptotics::ef_series(g);
    let mut rows: Vec<_> =
        gammas.iter().zip(&eps).map(|(&g, &e)| verify_row("epsilon_F", g, e, series(g))).collect();
    let residuals: Vec<f64> = gammas.iter().zip(&eps).map(|(&g, &e)| e - series(g)).collect();
    let fit = fit_order(&gammas, &residuals)?;
    let limit = cubic_intercept(&gammas, &eps);
    rows.push(verify_row("epsilon_F_limit", 0.0, limit, PI * PI / 12.0));
    let pass = fit.slope >= 1.7 && (limit - PI * PI / 12.0).abs() <= 1e-6;
    Ok(Report { suite: "energy", table_rows: rows, fit, pass })
}

/// Value at 0 of the interpolating cubic through four points (Neville).
pub fn cubic_intercept(xs: &[f64; 4], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    for level in 1..4 {
        for i in 0..(4 - level) {
            let (xi, xj) = (xs[i], xs[i + level]);
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    p[0]
}

/// Rescaled `∫f = r·m0` against `r + (1/π)(log r + log(π/2) + 1)`.
pub fn verify_fint() -> Result<Report> {
    let rs = [10.0, 20.0, 40.0, 80.0];
    let ints: Vec<f64> = rs
        .par_iter()
        .map(|&r| {
            let k = 2.0 / r;
            solve_love(Statistics::Fermi, k, default_nodes(k)).map(|s| r * s.m0)
        })
        .collect::<Result<_>>()?;
    let rows: Vec<_> = rs.iter().zip(&ints).map(|(&r, &f)| verify_row("fint", r, f, fint_series(r))).collect();
    let residuals: Vec<f64> = rs.iter().zip(&ints).map(|(&r, &f)| f - fint_series(r)).collect();
    let fit = fit_order(&rs, &residuals)?;
    let pass = fit.slope <= -0.7;
    Ok(Report { suite: "fint", table_rows: rows, fit, pass })
}

/// x-space `∫ĝ⁺` against `(1/2π)(log r + log(π/2) + 1)`.
pub fn verify_gplus() -> Result<Report> {
    let rs = [20.0, 50.0, 100.0, 200.0];
    let values: Vec<f64> = rs
        .par_iter()
        .map(|&r| {
            let grid = half_line_grid(r)?;
            g_plus_zero_x_space(r, &g_hat_plus(r, &grid)?)
        })
        .collect::<Result<_>>()?;
    let rows: Vec<_> =
        rs.iter().zip(&values).map(|(&r, &g)| verify_row("G_plus_0", r, g, gplus_coeffs(r)[0])).collect();
    let residuals: Vec<f64> = rs.iter().zip(&values).map(|(&r, &g)| g - gplus_coeffs(r)[0]).collect();
    let fit = fit_order(&rs, &residuals)?;
    let pass = fit.slope <= -0.7;
    Ok(Report { suite: "gplus", table_rows: rows, fit, pass })
}

/// Hankel-route `Q` at κ = 0.1 by Neumann order against the Fredholm value,
/// then the order-3 discrepancy `|f̂(0) - ∫f|/r` over r, whose slope is fitted.
pub fn verify_hankel() -> Result<Report> {
    let fredholm_fint = |r: f64| -> Result<f64> {
        let k = 2.0 / r;
        Ok(r * solve_love(Statistics::Fermi, k, default_nodes(k))?.m0)
    };
    let rs = [10.0, 20.0, 40.0, 80.0];
    let per_r: Vec<(f64, Vec<f64>)> = rs
        .par_iter()
        .map(|&r| {
            let grid = half_line_grid(r)?;
            let g = g_hat_plus(r, &grid)?;
            let op = HankelOperator::new(r, &grid)?;
            let res = neumann_with(r, 3, &g, Some(&op))?;
            let mut fhat = Vec::new();
            let mut h0 = 0.0;
            for term in &res.per_order {
                h0 += term;
                fhat.push(r + 2.0 * h0);
            }
            Ok((fredholm_fint(r)?, fhat))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    // κ = 0.1 is r = 20
    let (fint20, fhat20) = &per_r[1];
    let q_f = 0.1 / (2.0 * PI) * fint20;
    let mut errors = Vec::new();
    for (j, f) in fhat20.iter().enumerate() {
        let q_h = 0.1 / (2.0 * PI) * f;
        rows.push(verify_row(&format!("Q_order{}", j + 1), (j + 1) as f64, q_h, q_f));
        errors.push(((q_h - q_f) / q_f).abs());
    }
    let monotone = errors.windows(2).all(|w| w[1] < w[0]);
    let mut residuals = Vec::new();
    for (&r, (fint, fhat)) in rs.iter().zip(&per_r) {
        rows.push(verify_row("fhat0_order3", r, fhat[2], *fint));
        residuals.push((fhat[2] - fint) / r);
    }
    let fit = fit_order(&rs, &residuals)?;
    let pass = errors[2] <= 5e-3 && monotone && fit.slope <= -2.0;
    Ok(Report { suite: "hankel", table_rows: rows, fit, pass })
}

pub fn verify(suite: Suite) -> Result<Vec<Report>> {
    match suite {
        Suite::Charge => Ok(vec![verify_charge()?]),
        Suite::Energy => Ok(vec![verify_energy()?]),
        Suite::Fint => Ok(vec![verify_fint()?]),
        Suite::Gplus => Ok(vec![verify_gplus()?]),
        Suite::Hankel => Ok(vec![verify_hankel()?]),
        Suite::All => Ok(vec![
            verify_charge()?,
            verify_energy()?,
            verify_fint()?,
            verify_gplus()?,
            verify_hankel()?,
        ]),
    }
}

fn factor_table(xi: &[f64]) -> Result<(Table, f64)> {
    let mut table = Table::new(FACTOR_COLUMNS);
    let mut worst = 0.0f64;
    for &x in xi {
        let z = Complex64::new(x, 0.0);
        let p = factor(HalfPlane::Upper, z)?.value;
        let m = factor(HalfPlane::Lower, z)?.value;
        let residual = (p * m - symbol(x)).norm();
        worst = worst.max(residual);
        table.push(vec![
            Cell::Num(x),
            Cell::Num(symbol(x)),
            Cell::Num(p.re),
            Cell::Num(p.im),
            Cell::Num(m.re),
            Cell::Num(m.im),
            Cell::Num(residual),
        ]);
    }
    Ok((table, worst))
}

fn kernel_table(xs: &[f64]) -> Result<Table> {
    let mut table = Table::new(KERNEL_COLUMNS);
    let values: Vec<(f64, f64)> = xs
        .par_iter()
        .map(|&x| Ok((hankel_kernel_k(x)?, s1_kernel(x)?)))
        .collect::<Result<_>>()?;
    for (&x, (k, s)) in xs.iter().zip(values) {
        table.push(vec![Cell::Num(x), Cell::Num(k), Cell::Num(x * x * k), Cell::Num(s), Cell::Num(x * x * s)]);
    }
    Ok(table)
}

fn hankel_table(args: &HankelArgs) -> Result<Table> {
    let r = match (args.kappa, args.r) {
        (Some(k), None) if k > 0.0 => 2.0 / k,
        (None, Some(r)) => r,
        _ => return Err(Error::InvalidArgument("give exactly one positive --kappa or --r".into())),
    };
    if !(r >= MIN_R) {
        return Err(Error::InvalidArgument(format!("the Neumann series needs r ≥ {MIN_R}, got {r}")));
    }
    let grid = half_line_grid(r)?;
    let g = g_hat_plus(r, &grid)?;
    let op = if args.order > 1 { Some(HankelOperator::new(r, &grid)?) } else { None };
    let res = neumann_with(r, args.order, &g, op.as_ref())?;
    let mut table = Table::new(HANKEL_COLUMNS);
    let kappa = 2.0 / r;
    table.push(vec![Cell::Num(r), Cell::Int(0), Cell::Num(0.0), Cell::Num(0.0), Cell::Num(r), Cell::Num(kappa * r / (2.0 * PI))]);
    let mut h0 = 0.0;
    for (j, term) in res.per_order.iter().enumerate() {
        h0 += term;
        let fhat0 = r + 2.0 * h0;
        table.push(vec![
            Cell::Num(r),
            Cell::Int(j as i64 + 1),
            Cell::Num(*term),
            Cell::Num(h0),
            Cell::Num(fhat0),
            Cell::Num(kappa / (2.0 * PI) * fhat0),
        ]);
    }
    Ok(table)
}

fn emit_table(table: &Table, format: OutputFormat, w: &mut dyn Write) -> io::Result<()> {
    match format {
        OutputFormat::Csv => table.write_csv(w),
        OutputFormat::Json => write_json(w, &table.json_rows()),
    }
}

fn execute(config: &RunConfig, w: &mut dyn Write) -> Result<Outcome> {
    let io_err = |e: io::Error| Error::InvalidArgument(format!("cannot write output: {e}"));
    match &config.command {
        Command::Solve(args) => {
            let sol = solve_one(args.stat, args.coupling, args.n)?;
            let mut table = Table::new(SOLVE_COLUMNS);
            table.push(solve_row(&sol));
            emit_table(&table, config.output, w).map_err(io_err)?;
        }
        Command::Sweep(args) => {
            let values = log_space(args.from, args.to, args.points)?;
            let solutions: Vec<NystromSolution> = values
                .par_iter()
                .map(|&v| {
                    let coupling = match args.param {
                        SweepParam::Kappa => Coupling { kappa: Some(v), gamma: None, r: None },
                        SweepParam::Gamma => Coupling { kappa: None, gamma: Some(v), r: None },
                        SweepParam::R => Coupling { kappa: None, gamma: None, r: Some(v) },
                    };
                    solve_one(args.stat, coupling, args.n)
                })
                .collect::<Result<_>>()?;
            let mut table = Table::new(SOLVE_COLUMNS);
            for sol in &solutions {
                table.push(solve_row(sol));
            }
            emit_table(&table, config.output, w).map_err(io_err)?;
        }
        Command::Verify(args) => {
            let reports = verify(args.suite)?;
            match config.output {
                OutputFormat::Csv => {
                    for report in &reports {
                        report.write_csv(w).map_err(io_err)?;
                    }
                }
                OutputFormat::Json => {
                    let value = if reports.len() == 1 {
                        reports[0].to_json()
                    } else {
                        Value::Array(reports.iter().map(Report::to_json).collect())
                    };
                    write_json(w, &value).map_err(io_err)?;
                }
            }
            if reports.iter().any(|r| !r.pass) {
                return Ok(Outcome::NumericalFailure);
            }
        }
        Command::Factor(args) => {
            let (table, worst) = factor_table(&parse_range(&args.xi_grid)?)?;
            emit_table(&table, config.output, w).map_err(io_err)?;
            if !(worst < 1e-10) {
                return Ok(Outcome::NumericalFailure);
            }
        }
        Command::Kernel(args) => {
            let table = kernel_table(&parse_range(&args.x_grid)?)?;
            emit_table(&table, config.output, w).map_err(io_err)?;
        }
        Command::Hankel(args) => {
            emit_table(&hankel_table(args)?, config.output, w).map_err(io_err)?;
        }
    }
    Ok(Outcome::Pass)
}

/// Runs one command, writing the report to `out_path` or `stdout`, and
/// errors to `stderr`.
pub fn run(config: &RunConfig) -> Outcome {
    let mut buffer = Vec::new();
    let outcome = match execute(config, &mut buffer) {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("error: {e}");
            return Outcome::of_error(&e);
        }
    };
    let written = match &config.out_path {
        Some(path) => std::fs::write(path, &buffer),
        None => io::stdout().write_all(&buffer),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return Outcome::UsageError;
    }
    outcome
}

/// Runs one command into `w`; for tests and embedding.
pub fn run_to(config: &RunConfig, w: &mut dyn Write) -> std::result::Result<Outcome, Error> {
    execute(config, w)
}
