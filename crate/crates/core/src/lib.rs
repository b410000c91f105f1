//! Solitary waves of `u_t + (Lambda^s u - u Lambda^r u^2)_x = 0` on a
//! periodic box: pseudo-spectral functionals, constrained descent and
//! fixed-point solvers, time integration, and numerical probes of the
//! associated inequalities and scaling laws.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli_io;
pub mod error;
pub mod evolution;
pub mod functionals;
pub mod probes;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
