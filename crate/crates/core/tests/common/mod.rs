#![allow(dead_code)]

use std::sync::Arc;

use solwave::spectral::{make_grid, Field, Grid};

pub const TWO_HUNDRED_PI: f64 = 200.0 * std::f64::consts::PI;

/// Exact wave of `u'' = (1 - nu) u - u^3` with `mu = 2 sqrt(1 - nu)`.
pub fn sech_wave(grid: &Arc<Grid>, mu: f64) -> Field {
    let b = 0.5 * mu;
    let a = 2f64.sqrt() * b;
    Field::from_fn(grid, |x| a / (b * x).cosh())
}

pub fn sech_speed(mu: f64) -> f64 {
    1.0 - 0.25 * mu * mu
}

pub fn benchmark_grid() -> Arc<Grid> {
    make_grid(TWO_HUNDRED_PI, 4096).unwrap()
}

/// `u(0)` by trigonometric interpolation (grid node 0 is `-L/2`).
pub fn value_at_origin(u: &Field) -> f64 {
    u.values()[u.grid().points() / 2]
}
