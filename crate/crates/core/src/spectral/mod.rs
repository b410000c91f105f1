//! Periodic grid, transforms, Fourier multipliers, Sobolev norms and
//! alias-free products.

mod expr;
mod field;
mod grid;
mod symbol;

pub use expr::{Expr, Func};
pub use field::Field;
pub use grid::{make_grid, Grid};
pub use symbol::{
    check_nonlinear_symbol, check_symbol_assumptions, check_symbol_assumptions_with, GeneralSymbol,
    RatioRange, Symbol, SymbolReport, DEFAULT_RATIO_BOUND,
};

pub(crate) use field::dot;

use num_complex::Complex64;

use crate::error::Result;

/// Multiply the spectrum of `u` by the symbol values at the grid wavenumbers.
pub fn apply_multiplier(u: &Field, sym: &Symbol) -> Result<Field> {
    u.ensure_finite()?;
    if sym.is_identity() {
        return Ok(u.clone());
    }
    Ok(apply_weights(u, &sym.weights(u.grid())))
}

pub(crate) fn apply_weights(u: &Field, weights: &[f64]) -> Field {
    let mut c = u.spectrum();
    for (ck, w) in c.iter_mut().zip(weights) {
        *ck *= *w;
    }
    Field::from_spectrum(u.grid(), &c)
}

/// Spectral derivative; the unpaired Nyquist mode is dropped.
pub fn derivative(u: &Field) -> Result<Field> {
    u.ensure_finite()?;
    let grid = u.grid();
    let mut c = u.spectrum();
    for (ck, xi) in c.iter_mut().zip(grid.wavenumbers()) {
        *ck *= Complex64::new(0.0, xi);
    }
    c[grid.nyquist()] = Complex64::new(0.0, 0.0);
    Ok(Field::from_spectrum(grid, &c))
}

/// Translate `u` by `a`: returns `x -> u(x - a)` on the periodic box
/// (exact for band-limited fields, Nyquist mode dropped).
pub fn shift(u: &Field, a: f64) -> Field {
    let grid = u.grid();
    let mut c = u.spectrum();
    for (ck, xi) in c.iter_mut().zip(grid.wavenumbers()) {
        *ck *= Complex64::from_polar(1.0, -xi * a);
    }
    c[grid.nyquist()] = Complex64::new(0.0, 0.0);
    Field::from_spectrum(grid, &c)
}

/// `||Lambda^t u||_{L^2}` on the box.
pub fn sobolev_norm(u: &Field, t: f64) -> f64 {
    let grid = u.grid();
    let c = u.spectrum();
    let sum: f64 = c
        .iter()
        .zip(grid.wavenumbers())
        .map(|(ck, xi)| {
            let w = if t == 0.0 {
                1.0
            } else {
                (1.0 + xi * xi).powf(t)
            };
            w * ck.norm_sqr()
        })
        .sum();
    (sum * grid.length()).sqrt()
}

/// Pointwise product via 2N zero padding; exact for the retained band.
pub fn dealiased_product(u: &Field, v: &Field) -> Result<Field> {
    u.ensure_same_grid(v)?;
    let grid = u.grid();
    let up = grid.inverse_padded(&grid.pad(&u.spectrum()));
    let vp = grid.inverse_padded(&grid.pad(&v.spectrum()));
    let prod: Vec<f64> = up.iter().zip(&vp).map(|(a, b)| a * b).collect();
    let c = grid.truncate(&grid.forward_padded(&prod));
    Ok(Field::from_spectrum(grid, &c))
}

/// Output of [`cubic_term`].
pub(crate) struct Cubic {
    /// Coefficients of `u Lambda^r u^2` on the N band (Nyquist dropped).
    pub coeffs: Vec<Complex64>,
    /// `1/4 int u^2 Lambda^r u^2 dx`.
    pub quartic: f64,
}

/// Galerkin evaluation of `u Lambda^r u^2` on the 2N grid.
///
/// `u^2` is formed exactly (band N), the multiplier acts on that full band,
/// and the second product aliases only into modes outside the retained
/// `|k| < N/2` band.
pub(crate) fn cubic_term(
    grid: &Grid,
    coeffs: &[Complex64],
    padded_weights: Option<&[f64]>,
) -> Cubic {
    let up = grid.inverse_padded(&grid.pad(coeffs));
    let sq: Vec<f64> = up.iter().map(|v| v * v).collect();
    let h2 = grid.length() / (2 * grid.points()) as f64;
    let (nsq, quartic) = match padded_weights {
        None => {
            let q = 0.25 * dot(&sq, &sq) * h2;
            (sq, q)
        }
        Some(w) => {
            let mut c = grid.forward_padded(&sq);
            let mut acc = 0.0;
            for (ck, wk) in c.iter_mut().zip(w) {
                acc += wk * ck.norm_sqr();
                *ck *= *wk;
            }
            (grid.inverse_padded(&c), 0.25 * acc * grid.length())
        }
    };
    let prod: Vec<f64> = up.iter().zip(&nsq).map(|(a, b)| a * b).collect();
    let mut out = grid.truncate(&grid.forward_padded(&prod));
    out[grid.nyquist()] = Complex64::new(0.0, 0.0);
    Cubic {
        coeffs: out,
        quartic,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(l: f64, n: usize) -> std::sync::Arc<Grid> {
        make_grid(l, n).unwrap()
    }

    #[test]
    fn multiplier_single_modes() {
        let g = grid(2.0 * PI, 32);
        let c = Field::from_fn(&g, |_| 3.5);
        let out = apply_multiplier(&c, &Symbol::bessel(1.7)).unwrap();
        assert!(out.values().iter().all(|v| (v - 3.5).abs() < 1e-13));

        let u = Field::from_fn(&g, f64::cos);
        let out = apply_multiplier(&u, &Symbol::bessel(2.0)).unwrap();
        for (x, v) in g.nodes().iter().zip(out.values()) {
            assert!((v - 2.0 * x.cos()).abs() < 1e-13);
        }
        let out = apply_multiplier(&u, &Symbol::bessel(-1.0)).unwrap();
        for (x, v) in g.nodes().iter().zip(out.values()) {
            assert!((v - x.cos() / 2f64.sqrt()).abs() < 1e-13);
        }
    }

    #[test]
    fn multiplier_rejects_nan() {
        let g = grid(2.0 * PI, 16);
        let u = Field::from_fn(&g, |x| if x > 0.0 { f64::NAN } else { 0.0 });
        assert!(apply_multiplier(&u, &Symbol::bessel(1.0)).is_err());
        assert!(derivative(&u).is_err());
    }

    #[test]
    fn derivative_examples() {
        let g = grid(2.0 * PI, 32);
        let d = derivative(&Field::from_fn(&g, f64::cos)).unwrap();
        for (x, v) in g.nodes().iter().zip(d.values()) {
            assert!((v + x.sin()).abs() < 1e-13);
        }
        let d = derivative(&Field::from_fn(&g, |x| (2.0 * x).sin())).unwrap();
        for (x, v) in g.nodes().iter().zip(d.values()) {
            assert!((v - 2.0 * (2.0 * x).cos()).abs() < 1e-13);
        }
        let d = derivative(&Field::from_fn(&g, |_| 1.25)).unwrap();
        assert!(d.sup_norm() < 1e-15);
    }

    #[test]
    fn sobolev_examples() {
        let g = grid(2.0 * PI, 16);
        let u = Field::from_fn(&g, f64::cos);
        assert!((sobolev_norm(&u, 0.0) - PI.sqrt()).abs() < 1e-13);
        assert!((sobolev_norm(&u, 1.0) - (2.0 * PI).sqrt()).abs() < 1e-13);
        assert_eq!(sobolev_norm(&Field::zeros(&g), 0.7), 0.0);
    }

    #[test]
    fn product_examples() {
        let g = grid(2.0 * PI, 16);
        let u = Field::from_fn(&g, f64::cos);
        let p = dealiased_product(&u, &u).unwrap();
        for (x, v) in g.nodes().iter().zip(p.values()) {
            assert!((v - (0.5 + 0.5 * (2.0 * x).cos())).abs() < 1e-14);
        }
        let z = dealiased_product(&u, &Field::zeros(&g)).unwrap();
        assert!(z.sup_norm() == 0.0);
        let other = grid(2.0 * PI, 32);
        assert!(dealiased_product(&u, &Field::zeros(&other)).is_err());
    }

    #[test]
    fn product_at_quarter_band_matches_fine_grid() {
        let n = 32;
        let g = grid(2.0 * PI, n);
        let k = (n / 4) as f64;
        let u = Field::from_fn(&g, |x| (k * x).cos());
        let p = dealiased_product(&u, &u).unwrap();
        // reference: the product sampled on a 4N grid, restricted to the N nodes
        let fine = grid(2.0 * PI, 4 * n);
        let reference: Vec<f64> = (0..4 * n)
            .step_by(4)
            .map(|j| (k * fine.node(j)).cos().powi(2))
            .collect();
        for (a, b) in p.values().iter().zip(&reference) {
            assert!((a - b).abs() < 1e-13);
        }
        let mean: f64 = p.values().iter().sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 1e-14);
    }

    #[test]
    fn shift_moves_profile() {
        let g = grid(40.0, 256);
        let u = Field::from_fn(&g, |x| (-x * x).exp());
        let s = shift(&u, 3.0);
        for (x, v) in g.nodes().iter().zip(s.values()) {
            assert!((v - (-(x - 3.0) * (x - 3.0)).exp()).abs() < 1e-12);
        }
    }
}
