//! Numerics for the delta-function Bose and Fermi gases.
//!
//! The Lieb–Liniger (Bose) and Gaudin (Fermi) integral equations are solved
//! directly by a Nyström method ([`fredholm`]). For the Fermi case a second,
//! independent route goes through the explicit Wiener–Hopf factors of the
//! symbol `(1 + e^{-|ξ|})/2` ([`wiener_hopf`]) and a Neumann series for a
//! Hankel operator on the half-line ([`hankel`]). [`asymptotics`] holds the
//! weak-coupling series the two routes are checked against.

// `!(x > 0.0)` is used on purpose: NaN must fail the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod fredholm;
pub mod hankel;
pub mod quadrature;
pub mod special;
pub mod wiener_hopf;

pub use error::{Error, Result};
